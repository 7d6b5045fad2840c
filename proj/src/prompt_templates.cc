// Copyright 2026 DeepMind Technologies Limited
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csro/prompts.h"

namespace csro {

// Repeated rock-paper-scissors task description. Plain text, not a format
// string: the observation example contains literal braces.
const std::string& RrpsPromptTemplate() {
  static const std::string* text = new std::string(R"TEMPLATE(Act as an expert Python programmer and game theory enthusiast.

Your task is to implement an agent class called `Agent` that represents a
player's strategy in a game of Repeated Rock Paper Scissors.

## Game Rules:

* The game is played for 1000 rounds.
* Your goal is to maximize your total number of wins over the 1000 rounds.
* The valid moves are strings: 'ROCK', 'PAPER', 'SCISSORS'.
* ROCK beats SCISSORS, SCISSORS beats PAPER, and PAPER beats ROCK.

## Class Signature:

Your implementation must align with the following class structure.

```python
class Agent:

  def act(self, observation: dict[str, Any]) -> str:
    ...
```

## Input details:

The input `observation` is a dictionary with two keys representing the moves
played by the player and the opponent in the previous round. Defaults to `None`
for the first round.

```python
observation = {
  'my_action': 'ROCK',  # None for the first round.
  'opponent_action': 'PAPER',  # None for the first round.
}
```
)TEMPLATE");
  return *text;
}

// Repeated Leduc template. A format string: {name} placeholders, {{ and }}
// for literal braces.
const std::string& LeducPromptTemplate() {
  static const std::string* text = new std::string(R"TEMPLATE(Act as an expert in computer games, opponent modeling, algorithm design and multiagent learning. Your task is to iteratively improve the provided bot in repeated leduc poker. The bot will play leduc poker with an opponent for multiple games, where in each game their player positions are randomly permutated. The primary goal is to increase the scores on the provided evaluation metrics, where larger values are better.

Always adhere to best practices in Python coding.

# Rule of Leduc Poker
Leduc Poker is a simplified two-player poker game, ideal for AI research, that uses a small deck to focus on core poker concepts like betting strategy and imperfect information.

Here is a detailed breakdown of the rules to clarify legal moves. Note that in this implementation, the "Check" action is not available; players must use "Call" instead. A call may be zero-cost if there is no outstanding bet to match.

**1. Setup & Preliminaries**
*   **Players:** 2.
*   **Deck:** 6 cards (two Jacks, two Queens, two Kings).
*   **Blinds:** Before cards are dealt, mandatory bets are posted:
    *   Player 1 (P1) posts a **Small Blind** of 1 unit.
    *   Player 2 (P2) posts a **Big Blind** of 2 units.
*   **The Deal:** Each player receives one private card, face down.

**2. Core Betting Rules**
*   **Raise Sizing:** The amount to raise is fixed.
    *   **Round 1:** The raise amount is **2 units**.
    *   **Round 2:** The raise amount is **4 units**.
*   **Total Betting Cap:** The total betting cap for each round is a maximum of **two raises**.
*   **Acting First:** Player 1 (the small blind) acts first in both betting rounds (pre-flop and post-flop).

**3. Round 1: Pre-Flop Betting**
This round occurs before the public card is revealed.

*   **P1's First Action:** P1 must act on P2's 2-unit Big Blind.
    *   **Fold:** Forfeit the 1-unit blind. P2 wins the pot.
    *   **Call:** Match the 2 units by putting in 1 more unit.
    *   **Raise:** Make a 2-unit raise, for a total of 4 units (P1 puts in 3 units). The total betting cap has been reached.
*   **P2's Action:**
    *   If P1 **called**, P2 can **Call** (a zero-cost action, as bets are equal) to end the round, or **Raise** (by putting in 2 more units to make it 4 total).
    *   If P1 **raised**, P2 can only **Call** (by putting in 2 more units) or **Fold**. The betting cap has been reached.
*   **P1's Second Action (if necessary):** If P1 called and P2 then raised, the action returns to P1. P1 can only **Call** (by putting in 2 more units) or **Fold**.

**4. The Flop: Public Card**
After Round 1 betting concludes, one public card is dealt face-up. This card is shared by both players.

**5. Round 2: Post-Flop Betting**
This round occurs after the flop. There are no blinds.

*   **P1's First Action:**
    *   **Call:** Make a zero-cost call to pass the turn (as there is no outstanding bet).
    *   **Raise:** Make a 4-unit raise.
*   **P2's Action:**
    *   If P1 **called** (at zero-cost), P2 can also **Call** (at zero-cost, ending the round) or **Raise** 4 units.
    *   If P1 **raised**, P2 can **Call** (matching the 4 units), **Raise** (by putting in another 4 units, for a total bet of 8), or **Fold**. The total betting cap has been reached.
*   **Subsequent Actions:**
    *   If P2 **raised** (after P1's initial zero-cost call), the action returns to P1, who can **Call** (the 4 unit bet), **Raise** (to 8 total), or **Fold**. The total betting cap has been reached.
    *   If a player **raises**, the other player can only **Call** or **Fold**, as the betting cap has been reached.

**6. Showdown & Hand Ranking**
If neither player folds, a showdown occurs after Round 2 betting.

*   **Hand:** A player's hand is their private card combined with the public card.
*   **Hand Ranks (best to worst):**
    1.  **Pair:** Two cards of the same rank (e.g., J-J). Higher pairs beat lower pairs.
    2.  **High Card:** If no one has a pair, the player with the highest card wins (K > Q > J).
*   **Ties:** If both players have the same hand rank (e.g., both have a King-high), the pot is split.

**7. Winning**
A player wins the pot either by being the only one left after the other folds, or by having the best hand at showdown.


# Program Skeleton
You should design the bot according to the following APIs:

```python
class RepeatedLeducPokerBot:

  def receive_outcome(self, obs: dict[str, Any]):
    """Receive game outcome of previous game."""

  def restart(self, player_id: int):
    """Start a new round of leduc poker with being assigned the player position player_id."""
  
  def act(self, obs: dict[str, Any]) -> str:
    """Output an action given an observation.

      Args:
        obs: a JSON observation dictionary.
      Output:
        action, an action in {{'FOLD', 'CALL', 'RAISE'}}
    """
```

# Example observation format
The act method is called each time the agent need to make a decision during a game, given an observation in the format of JSON. Here are some examples of an observation:
{{'player_view': {{'player_id': 0, 'current_player': True, 'hand': 'K', 'legal_actions': ['CALL', 'RAISE']}}, 'public_state': {{'round': 'PREFLOP', 'chips': [99, 99], 'pot_size': 2, 'public_card': None}}, 'action_history': {{'PREFLOP': [], 'POSTFLOP': []}}, 'game_result': None}}

{{'player_view': {{'player_id': 1, 'current_player': True, 'hand': 'K', 'legal_actions': ['CALL', 'RAISE']}}, 'public_state': {{'round': 'POSTFLOP', 'chips': [99, 99], 'pot_size': 2, 'public_card': 'Q'}}, 'action_history': {{'PREFLOP': [{{'player_id': 0, 'action': 'CALL'}}, {{'player_id': 1, 'action': 'CALL'}}], 'POSTFLOP': [{{'player_id': 0, 'action': 'CALL'}}]}}, 'game_result': None}}

The receive_outcome method is called at the end of each game. The agent receives an observation of the final state of the game to improve game play for future games with the same opponent. The observation here contains final payoff for each player, and players' hands if the last action is not FOLD. Some examples:

{{'player_view': {{'player_id': 0, 'current_player': False, 'hand': 'K', 'legal_actions': []}}, 'public_state': {{'round': 'PREFLOP', 'chips': [101, 99], 'pot_size': 0, 'public_card': None}}, 'action_history': {{'PREFLOP': [{{'player_id': 0, 'action': 'RAISE'}}, {{'player_id': 1, 'action': 'FOLD'}}], 'POSTFLOP': []}}, 'game_result': {{'outcome': 'FOLD', 'returns': [1, -1], 'showdown_hands': None}}}}


{{'player_view':{{'player_id': 0, 'current_player': False, 'hand': 'J', 'legal_actions': []}}, 'public_state': {{'round': 'POSTFLOP', 'chips': [95, 105], 'pot_size': 0, 'public_card': 'Q'}}, 'action_history': {{'PREFLOP': [{{'player_id': 0, 'action': 'RAISE'}}, {{'player_id': 1, 'action': 'RAISE'}}, {{'player_id': 0, 'action': 'CALL'}}], 'POSTFLOP': [{{'player_id': 0, 'action': 'CALL'}}, {{'player_id': 1, 'action': 'CALL'}}]}}, 'game_result': {{'outcome': 'SHOWDOWN', 'returns': [-5, 5], 'showdown_hands': [{{'player_id': 0, 'hand': 'J'}}, {{'player_id': 1, 'hand': 'K'}}]}}}}

The restart method is called at the beginning of each game, where the agent is informed the player position it will act as in the next game.

legal_actions is a subset of {{'FOLD', 'CALL', 'RAISE'}}


# Current program
Here is the current program we are trying to improve (you will need to propose a modification to it below):

{code}

# Opponents
Here are the summary of opponent codes you are trying to beat:
{instances}

Try to reason about these opponents, and come up with a strategy that can exploit them in general.

# *SEARCH/REPLACE block* Rules:

Every *SEARCH/REPLACE block* must use this format:
1. The opening fence: ```python
2. The start of search block: <<<<<<< SEARCH
3. A contiguous chunk of up to 4 lines to search for in the existing source code
4. The dividing line: =======
5. The lines to replace into the source code
6. The end of the replace block: >>>>>>> REPLACE
7. The closing fence: ```

Every *SEARCH* section must *EXACTLY MATCH* the existing file content, character for character, including all comments, docstrings, etc.

*SEARCH/REPLACE* blocks will replace *all* matching occurrences.
Include enough lines to make the SEARCH blocks uniquely match the lines to change.

Keep *SEARCH/REPLACE* blocks concise.
Break large *SEARCH/REPLACE* blocks into a series of smaller blocks that each change a small portion of the file.
Include just the changing lines, and a few surrounding lines if needed for uniqueness.
Do not include long runs of unchanging lines in *SEARCH/REPLACE* blocks.

To move code within a file, use 2 *SEARCH/REPLACE* blocks: 1 to delete it from its current location, 1 to insert it in the new location.

Make sure that the changes you propose are consistent with each other. For example, if you refer to a new config variable somewhere, you should also propose a change to add that variable.

Example:
```python
<<<<<<< SEARCH
    return total_loss
=======
    # Add sparsity-promoting regularization to the loss.
    total_loss += self.hypers.l1_reg_weight * l1_reg

    return total_loss
{replace}
```
and
```python
<<<<<<< SEARCH
  return hyper.zipit([
=======
  return hyper.zipit([
      hyper.uniform('l1_reg_weight', hyper.interval(0.0, 0.01)),
{replace}
```

{lazy_prompt}
ONLY EVER RETURN CODE IN A *SEARCH/REPLACE BLOCK*!

# Task
{task_instruction} {focus_sentence} {trigger_chain_of_thought}
Describe each change with a *SEARCH/REPLACE block*.
)TEMPLATE");
  return *text;
}

}  // namespace csro
