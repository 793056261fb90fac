#pragma once

#include "qctx/empirical.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace qctx {

/// One outcome bit per (party, setting): bit (2p + s) is party p's
/// outcome under setting s, 0 meaning "+". 2^(2n) assignments exist.
using GlobalAssignment = std::uint32_t;

inline constexpr int kMaxEnumerationParties = 14;

/// Joint outcome produced when the assignment answers context c.
inline Eigen::Index restrict_assignment(GlobalAssignment g, Eigen::Index context, int n) {
  Eigen::Index outcome = 0;
  for (int p = 0; p < n; ++p) {
    const int s = setting_of(context, p, n);
    const int bit = int((g >> (2 * p + s)) & 1u);
    outcome = (outcome << 1) | bit;
  }
  return outcome;
}

namespace detail {

/// Fixed-width bitset over joint outcomes (up to 2^n bits).
struct OutcomeMask {
  std::vector<std::uint64_t> words;

  static OutcomeMask zeros(Eigen::Index bits) {
    OutcomeMask m;
    m.words.assign(std::size_t((bits + 63) / 64), 0);
    return m;
  }
  void set(Eigen::Index i) { words[std::size_t(i >> 6)] |= std::uint64_t(1) << (i & 63); }
  bool any() const {
    for (auto w : words)
      if (w) return true;
    return false;
  }
  void and_with(const OutcomeMask& o) {
    for (std::size_t i = 0; i < words.size(); ++i) words[i] &= o.words[i];
  }
};

}  // namespace detail

/// All global assignments whose restriction to every context lies in that
/// context's support. Depth-first over parties, pruning any branch that
/// empties some context's compatible-outcome set.
inline std::vector<GlobalAssignment> consistent_assignments(const SupportTable& table) {
  const int n = table.n();
  if (n > kMaxEnumerationParties)
    throw SizeBoundError("consistent_assignments: more than " +
                         std::to_string(kMaxEnumerationParties) + " parties");
  const Eigen::Index contexts = table.cells.rows();
  const Eigen::Index outcomes = table.cells.cols();

  // bit_mask[p][v]: outcomes whose party-p bit equals v.
  std::vector<std::array<detail::OutcomeMask, 2>> bit_mask(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    bit_mask[std::size_t(p)] = {detail::OutcomeMask::zeros(outcomes),
                                detail::OutcomeMask::zeros(outcomes)};
    for (Eigen::Index o = 0; o < outcomes; ++o)
      bit_mask[std::size_t(p)][std::size_t(bit_of(o, p, n))].set(o);
  }

  std::vector<detail::OutcomeMask> current(std::size_t(contexts),
                                           detail::OutcomeMask::zeros(outcomes));
  for (Eigen::Index c = 0; c < contexts; ++c)
    for (Eigen::Index o = 0; o < outcomes; ++o)
      if (table.cells(c, o)) current[std::size_t(c)].set(o);

  std::vector<GlobalAssignment> found;

  // Recurse over parties; each level owns a copy of the context masks.
  struct Frame {
    std::vector<detail::OutcomeMask> masks;
  };
  std::vector<Frame> stack(std::size_t(n) + 1);
  stack[0].masks = current;

  auto recurse = [&](auto&& self, int party, GlobalAssignment partial) -> void {
    if (party == n) {
      found.push_back(partial);
      return;
    }
    for (int o0 = 0; o0 < 2; ++o0)
      for (int o1 = 0; o1 < 2; ++o1) {
        auto& next = stack[std::size_t(party) + 1].masks;
        next = stack[std::size_t(party)].masks;
        bool alive = true;
        for (Eigen::Index c = 0; c < contexts && alive; ++c) {
          const int s = setting_of(c, party, n);
          const int val = s == 0 ? o0 : o1;
          next[std::size_t(c)].and_with(bit_mask[std::size_t(party)][std::size_t(val)]);
          alive = next[std::size_t(c)].any();
        }
        if (!alive) continue;
        const GlobalAssignment bits =
            GlobalAssignment(o0) << (2 * party) | GlobalAssignment(o1) << (2 * party + 1);
        self(self, party + 1, partial | bits);
      }
  };
  recurse(recurse, 0, 0);
  return found;
}

/// For each context, the support outcomes that no consistent global
/// assignment restricts to. Strong models mark every support outcome.
inline std::map<Eigen::Index, std::vector<int>> non_extendable_sections(
    const SupportTable& table, const std::vector<GlobalAssignment>& consistent) {
  const int n = table.n();
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> covered(table.cells.rows(),
                                                             table.cells.cols());
  covered.setConstant(false);
  for (GlobalAssignment g : consistent)
    for (Eigen::Index c = 0; c < table.cells.rows(); ++c)
      covered(c, restrict_assignment(g, c, n)) = true;

  std::map<Eigen::Index, std::vector<int>> out;
  for (Eigen::Index c = 0; c < table.cells.rows(); ++c) {
    std::vector<int> missing;
    for (Eigen::Index o = 0; o < table.cells.cols(); ++o)
      if (table.cells(c, o) && !covered(c, o)) missing.push_back(int(o));
    if (!missing.empty()) out.emplace(c, std::move(missing));
  }
  return out;
}

inline std::map<Eigen::Index, std::vector<int>> non_extendable_sections(
    const SupportTable& table) {
  return non_extendable_sections(table, consistent_assignments(table));
}

}  // namespace qctx
