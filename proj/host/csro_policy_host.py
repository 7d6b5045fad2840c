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

"""Runs one code policy and serves the line-delimited JSON wire protocol.

Usage: csro_policy_host.py --source <file> --game <rrps|leduc>

Each request line {"type", "payload", "seq"} gets exactly one response line
echoing seq. The agent class is the first class in the source that defines
an `act` method. Anything the policy prints goes to stderr so it cannot
corrupt the protocol stream.
"""

import argparse
import json
import os
import random
import sys
import traceback
import types


def load_agent_class(source_path):
  with open(source_path, encoding='utf-8') as f:
    text = f.read()
  module = types.ModuleType('csro_policy')
  module.__file__ = source_path
  sys.modules['csro_policy'] = module
  exec(compile(text, source_path, 'exec'), module.__dict__)  # pylint: disable=exec-used
  for value in list(module.__dict__.values()):
    if (isinstance(value, type) and value.__module__ == 'csro_policy'
        and callable(value.__dict__.get('act'))):
      return value
  raise LookupError('no class defining act() found in ' + source_path)


class Server:
  """Dispatches protocol requests to a hosted agent."""

  def __init__(self, source_path, game, out):
    self._source_path = source_path
    self._game = game
    self._out = out
    self._agent = None

  def send(self, type_, payload, seq):
    self._out.write(json.dumps({'type': type_, 'payload': payload,
                                'seq': seq}) + '\n')
    self._out.flush()

  def error(self, seq, exc):
    self.send('ERROR', {'message': f'{type(exc).__name__}: {exc}',
                        'traceback': traceback.format_exc()}, seq)

  def handle(self, msg):
    """Returns False when the host should exit."""
    type_ = msg.get('type')
    seq = msg.get('seq')
    payload = msg.get('payload')
    if type_ == 'INIT':
      try:
        random.seed((payload or {}).get('seed', 0))
        self._agent = load_agent_class(self._source_path)()
      except Exception as exc:  # pylint: disable=broad-except
        self.error(seq, exc)
        return False
      self.send('INIT', {'status': 'ok'}, seq)
      return True
    if self._agent is None:
      self.send('ERROR', {'message': 'INIT required first'}, seq)
      return True
    try:
      if type_ == 'ACT_REQUEST':
        self.send('ACT_RESPONSE', str(self._agent.act(payload)), seq)
      elif type_ == 'RESTART':
        if hasattr(self._agent, 'restart'):
          self._agent.restart(payload['player_id'])
        self.send('RESTART', {}, seq)
      elif type_ == 'OUTCOME':
        if hasattr(self._agent, 'receive_outcome'):
          self._agent.receive_outcome(payload)
        self.send('OUTCOME', {}, seq)
      else:
        self.send('ERROR', {'message': f'unknown message type {type_!r}'}, seq)
    except Exception as exc:  # pylint: disable=broad-except
      self.error(seq, exc)
    return True


def main():
  parser = argparse.ArgumentParser()
  parser.add_argument('--source', required=True)
  parser.add_argument('--game', required=True, choices=['rrps', 'leduc'])
  args = parser.parse_args()

  # Keep the protocol on a private copy of stdout.
  out = os.fdopen(os.dup(sys.stdout.fileno()), 'w', encoding='utf-8')
  sys.stdout = sys.stderr
  server = Server(args.source, args.game, out)
  for raw in sys.stdin.buffer:
    try:
      msg = json.loads(raw)
    except ValueError as exc:
      server.send('ERROR', {'message': f'bad request: {exc}'}, None)
      continue
    if not server.handle(msg):
      sys.exit(1)


if __name__ == '__main__':
  main()
