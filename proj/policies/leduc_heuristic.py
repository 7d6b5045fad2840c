# Copyright 2026 DeepMind Technologies Limited
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Starting policy for repeated Leduc. Runs as the native port unless the
# policy host is preferred.
# native-policy: leduc_heuristic

import random
from typing import Any, Dict


class RepeatedLeducPokerBot:
  """
  A simple heuristic bot for repeated Leduc Poker.

  The bot's strategy is based on a set of rules that consider the strength
  of its private card, the public card (if revealed), and the current
  betting round. It does not learn from the opponent's behavior.
  """

  def __init__(self):
    """Initializes the bot."""
    self.player_id: int = -1
    self.card_ranking = {'J': 1, 'Q': 2, 'K': 3}

  def receive_outcome(self, obs: Dict[str, Any]):
    """
    Receives the game outcome of the previous game.

    For this simple heuristic bot, this method does nothing as it
    does not adapt its strategy based on past games.
    """
    pass

  def restart(self, player_id: int):
    """
    Starts a new game of Leduc Poker, assigning the player position.

    Args:
        player_id: The player ID (0 or 1) for the new game.
    """
    self.player_id = player_id

  def act(self, obs: Dict[str, Any]) -> str:
    """
    Outputs an action given an observation.

    Args:
        obs: A dictionary containing the game state from the player's perspective.
    
    Returns:
        A string representing the chosen action: 'FOLD', 'CALL', or 'RAISE'.
    """
    player_view = obs.get('player_view', {})
    public_state = obs.get('public_state', {})
    legal_actions = player_view.get('legal_actions', [])

    if not legal_actions:
      # If there are no legal actions, we can't do anything.
      # This can happen at the end of a hand.
      return 'CALL'

    hand = player_view.get('hand')
    round_name = public_state.get('round')

    if round_name == 'PREFLOP':
      return self._preflop_strategy(hand, legal_actions)
    elif round_name == 'POSTFLOP':
      public_card = public_state.get('public_card')
      return self._postflop_strategy(hand, public_card, legal_actions)

    # Default action if something unexpected happens
    return 'CALL' if 'CALL' in legal_actions else random.choice(legal_actions)

  def _preflop_strategy(self, hand: str, legal_actions: list[str]) -> str:
    """Determines the action for the pre-flop round."""
    hand_strength = self.card_ranking.get(hand, 0)

    # Strong hand (King) - play aggressively
    if hand_strength == 3:  # King
      if 'RAISE' in legal_actions:
        return 'RAISE'
      return 'CALL'

    # Medium hand (Queen) - play cautiously
    elif hand_strength == 2:  # Queen
      # If we can call, we do. Avoid folding if possible.
      if 'CALL' in legal_actions:
        return 'CALL'
      # This case should ideally not be hit if CALL is always an option
      # when FOLD is, but as a fallback.
      return 'FOLD'

    # Weak hand (Jack) - play defensively
    else: # Jack
      # We want to see the flop cheaply.
      if 'CALL' in legal_actions:
        return 'CALL'
      return 'FOLD'

  def _postflop_strategy(self, hand: str, public_card: str, legal_actions: list[str]) -> str:
    """Determines the action for the post-flop round."""
    hand_strength = self.card_ranking.get(hand, 0)
    public_card_strength = self.card_ranking.get(public_card, 0)
    
    # Check for a pair (strongest hand)
    if hand == public_card:
      if 'RAISE' in legal_actions:
        return 'RAISE'
      return 'CALL'

    # High card strategy
    # If our private card is better than the public card, we have a decent high card hand
    if hand_strength > public_card_strength:
      if 'RAISE' in legal_actions:
        return 'RAISE'
      return 'CALL'

    # If our private card is weaker than the public card, our hand is weak.
    else:
      # Check-call if possible (zero-cost call)
      # A zero-cost call is implied if we just need to call 0 chips.
      # We will simplify and just check/call.
      if 'CALL' in legal_actions:
        return 'CALL'
      return 'FOLD'
