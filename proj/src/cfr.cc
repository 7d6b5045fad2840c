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

#include "csro/cfr.h"

#include <algorithm>
#include <numeric>
#include <set>

namespace csro::cfr {
namespace {

using leduc::Action;
using leduc::BettingRound;
using leduc::HandState;
using leduc::Rank;

constexpr int kNumRanks = 3;
// Public-card slots: 0 while preflop, 1 + rank once revealed.
constexpr int kNumPublicSlots = kNumRanks + 1;

int A(Action a) { return static_cast<int>(a); }
int R(Rank r) { return static_cast<int>(r); }

char ActionLetter(Action a) {
  switch (a) {
    case Action::kFold:
      return 'f';
    case Action::kCall:
      return 'c';
    case Action::kRaise:
      return 'r';
  }
  return '?';
}

}  // namespace

std::string InfoSetKey(int player, Rank card, std::optional<Rank> public_card,
                       const std::string& betting) {
  std::string key = std::to_string(player);
  key += ':';
  key += leduc::RankName(card);
  key += ':';
  key += public_card ? std::string(leduc::RankName(*public_card)) : "-";
  key += ':';
  key += betting;
  return key;
}

std::string InfoSetKey(const leduc::Observation& obs) {
  std::string betting;
  for (const auto& e : obs.action_history[0]) betting += ActionLetter(e.action);
  if (obs.round == BettingRound::kPostflop) {
    betting += '/';
    for (const auto& e : obs.action_history[1]) betting += ActionLetter(e.action);
  }
  return InfoSetKey(obs.player_id, obs.hand, obs.public_card, betting);
}

std::vector<double> RegretMatchingPlus(const std::vector<double>& regret) {
  double total = 0;
  for (double r : regret) {
    if (r < 0) throw std::invalid_argument("negative regret");
    total += r;
  }
  std::vector<double> p(regret.size());
  for (size_t i = 0; i < regret.size(); ++i) {
    p[i] = total > 0 ? regret[i] / total : 1.0 / regret.size();
  }
  return p;
}

const ActionProbs& StrategyProfile::At(const std::string& key) const {
  auto it = table.find(key);
  if (it == table.end()) throw MissingInfoSetError(key);
  return it->second;
}

OrderedJson StrategyProfile::ToJson() const {
  OrderedJson j = OrderedJson::object();
  for (const auto& [key, probs] : table) {
    OrderedJson entry = OrderedJson::object();
    for (int a = 0; a < 3; ++a) {
      if (probs[a] > 0) entry[std::string(leduc::ActionName(Action(a)))] = probs[a];
    }
    j[key] = std::move(entry);
  }
  return j;
}

StrategyProfile StrategyProfile::FromJson(const Json& j, leduc::StakeMode mode) {
  StrategyProfile p;
  p.stake_mode = mode;
  for (const auto& [key, entry] : j.items()) {
    ActionProbs probs = {0, 0, 0};
    for (const auto& [name, value] : entry.items()) {
      auto a = leduc::ParseAction(name);
      if (!a) throw std::invalid_argument("unknown action '" + name + "' at " + key);
      probs[A(*a)] = value.get<double>();
    }
    p.table[key] = probs;
  }
  return p;
}

// ---------------------------------------------------------------------------

struct LeducTree::Impl {
  struct Node {
    int player = -1;  // -1 at terminals
    BettingRound round = BettingRound::kPreflop;
    std::string betting;
    std::vector<Action> path;
    std::vector<Action> actions;
    std::array<int, 3> child = {-1, -1, -1};  // by action
    int folder = -1;                          // terminals only
    std::array<int, 2> contrib = {0, 0};
  };
  struct Deal {
    std::array<int, 2> cards;
    int pub;
    double weight;
    int showdown;  // sign of seat 0's showdown result
  };

  leduc::StakeMode mode;
  std::vector<Rank> deck;
  std::vector<Node> nodes;
  std::vector<Deal> deals;
  // reachable[infoset index]; index = (node * 3 + card) * 4 + public slot.
  std::vector<char> reachable;
  std::vector<std::string> keys;

  int Build(const HandState& s, std::vector<Action> path) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    Node n;
    n.round = s.round();
    n.betting = s.BettingString();
    n.path = path;
    n.contrib = s.contributions();
    if (s.IsTerminal()) {
      const auto result = s.Result();
      if (result.outcome == leduc::Outcome::kFold) {
        n.folder =
            s.action_history()[static_cast<int>(s.round())].back().player_id;
      }
      nodes[id] = std::move(n);
      return id;
    }
    n.player = s.CurrentPlayer();
    n.actions = s.LegalActions();
    for (Action a : n.actions) {
      auto p = path;
      p.push_back(a);
      const int c = Build(s.Child(a), std::move(p));
      n.child[A(a)] = c;
    }
    nodes[id] = std::move(n);
    return id;
  }

  static int Slot(const Node& n, int pub) {
    return n.round == BettingRound::kPreflop ? 0 : 1 + pub;
  }
  int InfoSet(int node, int card, int pub) const {
    return (node * kNumRanks + card) * kNumPublicSlots + Slot(nodes[node], pub);
  }
  int InfoSetFor(int node, const Deal& d) const {
    return InfoSet(node, d.cards[nodes[node].player], d.pub);
  }

  // Seat 0's payoff at a terminal.
  double Utility0(const Node& n, const Deal& d) const {
    if (n.folder == 0) return -n.contrib[0];
    if (n.folder == 1) return n.contrib[1];
    if (d.showdown > 0) return n.contrib[1];
    if (d.showdown < 0) return -n.contrib[0];
    return 0;
  }

  Impl(leduc::StakeMode m, std::vector<Rank> cards)
      : mode(m), deck(std::move(cards)) {
    if (deck.size() < 3) throw std::invalid_argument("deck needs three cards");
    Build(HandState(mode, {deck[0], deck[1]}, deck[2]), {});
    // Ordered deals without replacement, merged by rank.
    std::map<std::array<int, 3>, double> merged;
    const int k = static_cast<int>(deck.size());
    const double p = 1.0 / (k * (k - 1) * (k - 2));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        for (int b = 0; b < k; ++b) {
          if (i == j || i == b || j == b) continue;
          merged[{R(deck[i]), R(deck[j]), R(deck[b])}] += p;
        }
      }
    }
    for (const auto& [c, w] : merged) {
      const auto h0 = leduc::HandRank(Rank(c[0]), Rank(c[2]));
      const auto h1 = leduc::HandRank(Rank(c[1]), Rank(c[2]));
      deals.push_back({{c[0], c[1]}, c[2], w, h0 > h1 ? 1 : (h0 < h1 ? -1 : 0)});
    }
    reachable.assign(nodes.size() * kNumRanks * kNumPublicSlots, 0);
    std::set<std::pair<std::string, int>> sorted;
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
      if (nodes[n].player < 0) continue;
      for (const auto& d : deals) {
        const int i = InfoSetFor(n, d);
        if (reachable[i]) continue;
        reachable[i] = 1;
        sorted.insert({Key(i), i});
      }
    }
    for (const auto& [key, i] : sorted) keys.push_back(key);
  }

  std::string Key(int infoset) const {
    const int slot = infoset % kNumPublicSlots;
    const int card = (infoset / kNumPublicSlots) % kNumRanks;
    const int node = infoset / (kNumPublicSlots * kNumRanks);
    std::optional<Rank> pub;
    if (slot > 0) pub = Rank(slot - 1);
    return InfoSetKey(nodes[node].player, Rank(card), pub, nodes[node].betting);
  }

  // Per-infoset strategies of one seat from a profile, validated.
  std::vector<ActionProbs> Resolve(const StrategyProfile& profile,
                                   int seat) const {
    std::vector<ActionProbs> out(reachable.size(), ActionProbs{0, 0, 0});
    for (size_t i = 0; i < reachable.size(); ++i) {
      if (!reachable[i]) continue;
      const Node& n = nodes[i / (kNumPublicSlots * kNumRanks)];
      if (n.player != seat) continue;
      const std::string key = Key(static_cast<int>(i));
      const ActionProbs& p = profile.At(key);
      double total = 0;
      for (int a = 0; a < 3; ++a) {
        const bool legal = n.child[a] >= 0;
        if (p[a] < 0 || (!legal && p[a] > 0)) {
          throw std::invalid_argument("bad probabilities at infoset " + key);
        }
        total += p[a];
      }
      if (std::abs(total - 1) > 1e-9) {
        throw std::invalid_argument("probabilities at infoset " + key +
                                    " do not sum to 1");
      }
      out[i] = p;
    }
    return out;
  }

  double Value(int node, const Deal& d, const std::array<const ActionProbs*, 2>&
                                            strat) const {
    const Node& n = nodes[node];
    if (n.player < 0) return Utility0(n, d);
    const ActionProbs& p = strat[n.player][InfoSetFor(node, d)];
    double v = 0;
    for (Action a : n.actions) {
      if (p[A(a)] > 0) v += p[A(a)] * Value(n.child[A(a)], d, strat);
    }
    return v;
  }

  // Best response for `seat` holding one fixed card. `w` holds the weight
  // (chance times opponent reach) of each deal in `ds`. Returns the weighted
  // value of each deal under the best response.
  std::vector<double> BestResponse(int node, int seat,
                                   const std::vector<const Deal*>& ds,
                                   const std::vector<double>& w,
                                   const std::vector<ActionProbs>& opp) const {
    const Node& n = nodes[node];
    const size_t m = ds.size();
    std::vector<double> out(m, 0);
    if (n.player < 0) {
      const double sign = seat == 0 ? 1 : -1;
      for (size_t k = 0; k < m; ++k) {
        if (w[k] != 0) out[k] = w[k] * sign * Utility0(n, *ds[k]);
      }
      return out;
    }
    if (n.player != seat) {
      for (Action a : n.actions) {
        std::vector<double> wa(m);
        bool any = false;
        for (size_t k = 0; k < m; ++k) {
          wa[k] = w[k] * opp[InfoSetFor(node, *ds[k])][A(a)];
          any |= wa[k] != 0;
        }
        if (!any) continue;
        const auto v = BestResponse(n.child[A(a)], seat, ds, wa, opp);
        for (size_t k = 0; k < m; ++k) out[k] += v[k];
      }
      return out;
    }
    std::vector<std::vector<double>> child;
    for (Action a : n.actions) {
      child.push_back(BestResponse(n.child[A(a)], seat, ds, w, opp));
    }
    // Deals sharing an information set must take the same action: all of
    // them preflop, those with equal public card postflop.
    for (int slot = 0; slot < kNumPublicSlots; ++slot) {
      int best = -1;
      double best_value = 0;
      for (size_t a = 0; a < child.size(); ++a) {
        double total = 0;
        bool any = false;
        for (size_t k = 0; k < m; ++k) {
          if (Slot(n, ds[k]->pub) != slot) continue;
          total += child[a][k];
          any = true;
        }
        if (!any) break;
        if (best < 0 || total > best_value) {
          best = static_cast<int>(a);
          best_value = total;
        }
      }
      if (best < 0) continue;
      for (size_t k = 0; k < m; ++k) {
        if (Slot(n, ds[k]->pub) == slot) out[k] = child[best][k];
      }
    }
    return out;
  }

  double BestResponseValue(const StrategyProfile& profile, int seat) const {
    const auto opp = Resolve(profile, 1 - seat);
    double total = 0;
    for (int card = 0; card < kNumRanks; ++card) {
      std::vector<const Deal*> ds;
      std::vector<double> w;
      for (const auto& d : deals) {
        if (d.cards[seat] != card) continue;
        ds.push_back(&d);
        w.push_back(d.weight);
      }
      if (ds.empty()) continue;
      for (double v : BestResponse(0, seat, ds, w, opp)) total += v;
    }
    return total;
  }

  // One CFR+ pass updating `seat`. Returns the seat's expected value.
  double Update(int node, const Deal& d, int seat, double reach_self,
                double reach_other, double avg_weight,
                const std::vector<ActionProbs>& current,
                std::vector<ActionProbs>& regret,
                std::vector<ActionProbs>& avg) const {
    const Node& n = nodes[node];
    if (n.player < 0) return (seat == 0 ? 1 : -1) * Utility0(n, d);
    const int i = InfoSetFor(node, d);
    const ActionProbs& p = current[i];
    if (n.player != seat) {
      double v = 0;
      // No pruning on zero opponent reach: the average strategy below is
      // weighted by own reach only.
      for (Action a : n.actions) {
        v += p[A(a)] * Update(n.child[A(a)], d, seat, reach_self,
                              reach_other * p[A(a)], avg_weight, current,
                              regret, avg);
      }
      return v;
    }
    std::array<double, 3> va = {0, 0, 0};
    double v = 0;
    for (Action a : n.actions) {
      va[A(a)] = Update(n.child[A(a)], d, seat, reach_self * p[A(a)],
                        reach_other, avg_weight, current, regret, avg);
      v += p[A(a)] * va[A(a)];
    }
    for (Action a : n.actions) {
      regret[i][A(a)] += reach_other * (va[A(a)] - v);
      avg[i][A(a)] += avg_weight * reach_self * p[A(a)];
    }
    return v;
  }

  ActionProbs Normalized(int infoset, const ActionProbs& x) const {
    const Node& n = nodes[infoset / (kNumPublicSlots * kNumRanks)];
    double total = 0;
    for (Action a : n.actions) total += std::max(0.0, x[A(a)]);
    ActionProbs p = {0, 0, 0};
    for (Action a : n.actions) {
      p[A(a)] = total > 0 ? std::max(0.0, x[A(a)]) / total
                          : 1.0 / n.actions.size();
    }
    return p;
  }

  StrategyProfile ToProfile(const std::vector<ActionProbs>& x) const {
    StrategyProfile profile;
    profile.stake_mode = mode;
    for (size_t i = 0; i < reachable.size(); ++i) {
      if (reachable[i]) {
        profile.table[Key(static_cast<int>(i))] =
            Normalized(static_cast<int>(i), x[i]);
      }
    }
    return profile;
  }
};

LeducTree::LeducTree(leduc::StakeMode mode, std::vector<Rank> deck)
    : impl_(std::make_unique<Impl>(mode, std::move(deck))) {}
LeducTree::~LeducTree() = default;

leduc::StakeMode LeducTree::stake_mode() const { return impl_->mode; }
const std::vector<Rank>& LeducTree::deck() const { return impl_->deck; }
std::vector<std::string> LeducTree::InfoSetKeys() const { return impl_->keys; }

std::vector<Action> LeducTree::Legal(const std::string& key) const {
  for (size_t i = 0; i < impl_->reachable.size(); ++i) {
    if (impl_->reachable[i] && impl_->Key(static_cast<int>(i)) == key) {
      return impl_->nodes[i / (kNumPublicSlots * kNumRanks)].actions;
    }
  }
  throw MissingInfoSetError(key);
}

StrategyProfile LeducTree::Tabulate(
    const std::function<ActionProbs(const std::string&,
                                    const std::vector<Action>&)>& f) const {
  StrategyProfile profile;
  profile.stake_mode = impl_->mode;
  for (size_t i = 0; i < impl_->reachable.size(); ++i) {
    if (!impl_->reachable[i]) continue;
    const std::string key = impl_->Key(static_cast<int>(i));
    profile.table[key] =
        f(key, impl_->nodes[i / (kNumPublicSlots * kNumRanks)].actions);
  }
  return profile;
}

StrategyProfile LeducTree::Uniform() const {
  return Tabulate([](const std::string&, const std::vector<Action>& legal) {
    ActionProbs p = {0, 0, 0};
    for (Action a : legal) p[A(a)] = 1.0 / legal.size();
    return p;
  });
}

StrategyProfile LeducTree::FromPolicy(const PolicyHandle& policy) const {
  if (policy.game() != GameId::kRepeatedLeduc) {
    throw std::invalid_argument(policy.id() + " is not a Leduc policy");
  }
  StrategyProfile profile;
  profile.stake_mode = impl_->mode;
  auto agent = policy.NewAgent(0);
  for (size_t i = 0; i < impl_->reachable.size(); ++i) {
    if (!impl_->reachable[i]) continue;
    const int node = static_cast<int>(i / (kNumPublicSlots * kNumRanks));
    const auto& n = impl_->nodes[node];
    // Any deal consistent with the infoset will do.
    const Impl::Deal* deal = nullptr;
    for (const auto& d : impl_->deals) {
      if (impl_->InfoSetFor(node, d) == static_cast<int>(i)) {
        deal = &d;
        break;
      }
    }
    HandState s(impl_->mode, {Rank(deal->cards[0]), Rank(deal->cards[1])},
                Rank(deal->pub));
    for (Action a : n.path) s.Apply(a);
    agent->Restart(n.player);
    const std::string reply = agent->Act(s.ObservationFor(n.player));
    const auto a = leduc::ParseAction(reply);
    const std::string key = impl_->Key(static_cast<int>(i));
    if (!a || !s.IsLegal(*a)) {
      throw std::invalid_argument(policy.id() + " played '" + reply + "' at " +
                                  key);
    }
    ActionProbs p = {0, 0, 0};
    p[A(*a)] = 1;
    profile.table[key] = p;
  }
  return profile;
}

double LeducTree::ExpectedValue(const StrategyProfile& seat0,
                                const StrategyProfile& seat1) const {
  const auto s0 = impl_->Resolve(seat0, 0);
  const auto s1 = impl_->Resolve(seat1, 1);
  double v = 0;
  for (const auto& d : impl_->deals) {
    v += d.weight * impl_->Value(0, d, {s0.data(), s1.data()});
  }
  return v;
}

double LeducTree::BestResponseValue(const StrategyProfile& profile,
                                    int seat) const {
  if (seat != 0 && seat != 1) throw std::invalid_argument("seat must be 0 or 1");
  return impl_->BestResponseValue(profile, seat);
}

double LeducTree::Exploitability(const StrategyProfile& profile) const {
  return (BestResponseValue(profile, 0) + BestResponseValue(profile, 1)) / 2;
}

// ---------------------------------------------------------------------------

StrategyProfile CfrPlusSolve(const SolveOptions& options) {
  if (options.iterations < 0) throw std::invalid_argument("negative iterations");
  LeducTree tree(options.stake_mode, options.deck);
  const LeducTree::Impl& g = *tree.impl_;
  const size_t size = g.reachable.size();
  std::vector<ActionProbs> regret(size, ActionProbs{0, 0, 0});
  std::vector<ActionProbs> avg(size, ActionProbs{0, 0, 0});
  std::vector<ActionProbs> current(size);
  auto checkpoint = [&](int t) {
    if (options.on_checkpoint &&
        std::find(options.checkpoints.begin(), options.checkpoints.end(), t) !=
            options.checkpoints.end()) {
      options.on_checkpoint(t, g.ToProfile(avg));
    }
  };
  checkpoint(0);
  for (int t = 1; t <= options.iterations; ++t) {
    for (int seat = 0; seat < 2; ++seat) {
      for (size_t i = 0; i < size; ++i) {
        if (g.reachable[i]) current[i] = g.Normalized(static_cast<int>(i), regret[i]);
      }
      for (const auto& d : g.deals) {
        g.Update(0, d, seat, d.weight, d.weight, t, current, regret, avg);
      }
      for (auto& r : regret) {
        for (double& x : r) x = std::max(0.0, x);
      }
    }
    checkpoint(t);
  }
  return g.ToProfile(avg);
}

StrategyProfile CfrPlusSolve(int iterations, leduc::StakeMode mode) {
  SolveOptions options;
  options.iterations = iterations;
  options.stake_mode = mode;
  return CfrPlusSolve(options);
}

namespace {

class TableAgent final : public Agent {
 public:
  TableAgent(std::shared_ptr<const StrategyProfile> profile, uint64_t seed)
      : profile_(std::move(profile)), rng_(seed) {}

  std::string Act(const Observation& obs) override {
    const auto& o = std::get<leduc::Observation>(obs);
    const ActionProbs& p = profile_->At(InfoSetKey(o));
    return std::string(leduc::ActionName(Action(rng_.Sample(p))));
  }

 private:
  std::shared_ptr<const StrategyProfile> profile_;
  Rng rng_;
};

}  // namespace

PolicyHandle AsPolicy(const StrategyProfile& profile, const std::string& id) {
  auto shared = std::make_shared<const StrategyProfile>(profile);
  return PolicyHandle(
      id, GameId::kRepeatedLeduc, PolicyKind::kCfrTable,
      [shared](uint64_t seed) -> std::unique_ptr<Agent> {
        return std::make_unique<TableAgent>(shared, seed);
      });
}

}  // namespace csro::cfr
