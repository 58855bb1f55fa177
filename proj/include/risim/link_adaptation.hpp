// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// NR-style link adaptation: MCS table, BLER-target control loop, RSRP-based
// nominal index with bounded fast jumps, and stop-and-wait HARQ.
//
// The MCS table is the standard 64-QAM PDSCH table (29 indices). Block
// error probability is synthesized with a logistic curve per index: the
// 50% point sits at the SNR where the Shannon rate equals the entry's
// spectral efficiency, and the slope is 2 per dB. That keeps ordering and
// spacing of the indices physically sensible without dragging in a full
// PHY abstraction.

namespace risim {

struct McsEntry {
  int index = 0;
  int modulation_order = 2;
  double code_rate = 0.0;           // dimensionless, in (0, 1)
  double spectral_efficiency = 0.0; // modulation_order * code_rate, bit/s/Hz
};

// Operational index range used by the controller (table indices outside it
// exist but are never selected at runtime).
inline constexpr int kMcsMin = 3;
inline constexpr int kMcsMax = 27;

// BLER control deadband around the 0.1 target.
inline constexpr double kBlerStepUpBelow = 0.05;
inline constexpr double kBlerStepDownAbove = 0.15;

class McsTable {
 public:
  static McsTable qam64() {
    // index, modulation order, code rate x1024 -- 64-QAM PDSCH table.
    static constexpr std::array<std::array<int, 3>, 29> rows{{
        {0, 2, 120},   {1, 2, 157},   {2, 2, 193},   {3, 2, 251},   {4, 2, 308},
        {5, 2, 379},   {6, 2, 449},   {7, 2, 526},   {8, 2, 602},   {9, 2, 679},
        {10, 4, 340},  {11, 4, 378},  {12, 4, 434},  {13, 4, 490},  {14, 4, 553},
        {15, 4, 616},  {16, 4, 658},  {17, 6, 438},  {18, 6, 466},  {19, 6, 517},
        {20, 6, 567},  {21, 6, 616},  {22, 6, 666},  {23, 6, 719},  {24, 6, 772},
        {25, 6, 822},  {26, 6, 873},  {27, 6, 910},  {28, 6, 948},
    }};
    McsTable t;
    for (const auto& r : rows) {
      McsEntry e;
      e.index = r[0];
      e.modulation_order = r[1];
      e.code_rate = static_cast<double>(r[2]) / 1024.0;
      e.spectral_efficiency = e.modulation_order * e.code_rate;
      t.entries_.push_back(e);
    }
    t.validate();
    return t;
  }

  // Loads the table from its plain-text form: one `index modulation_order
  // code_rate_x1024 spectral_efficiency` row per line, '#' comments. The
  // trailing column is the standard's rounded value and is cross-checked
  // against the exact product, which is what gets stored.
  static McsTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("McsTable::load: cannot open " + path.string());
    McsTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      int index = 0, qm = 0, rate_x1024 = 0;
      double se_rounded = 0.0;
      if (!(row >> index)) continue;  // blank line
      if (!(row >> qm >> rate_x1024 >> se_rounded))
        throw std::runtime_error("McsTable::load: malformed row at " + path.string() + ":" +
                                 std::to_string(lineno));
      McsEntry e;
      e.index = index;
      e.modulation_order = qm;
      e.code_rate = static_cast<double>(rate_x1024) / 1024.0;
      e.spectral_efficiency = e.modulation_order * e.code_rate;
      if (std::abs(e.spectral_efficiency - se_rounded) > 5e-4)
        throw std::runtime_error("McsTable::load: spectral efficiency mismatch at " +
                                 path.string() + ":" + std::to_string(lineno));
      t.entries_.push_back(e);
    }
    t.validate();
    return t;
  }

  const McsEntry& at(int index) const {
    if (index < 0 || index >= static_cast<int>(entries_.size()))
      throw std::out_of_range("McsTable::at: index " + std::to_string(index) + " out of range");
    return entries_[static_cast<std::size_t>(index)];
  }

  int size() const { return static_cast<int>(entries_.size()); }

  const std::vector<McsEntry>& entries() const { return entries_; }

  void validate() const {
    if (entries_.size() != 29)
      throw std::runtime_error("McsTable: expected 29 entries, got " +
                               std::to_string(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const McsEntry& e = entries_[i];
      if (e.index != static_cast<int>(i)) throw std::runtime_error("McsTable: indices not dense");
      if (e.modulation_order != 2 && e.modulation_order != 4 && e.modulation_order != 6)
        throw std::runtime_error("McsTable: unexpected modulation order");
      if (!(e.code_rate > 0.0 && e.code_rate < 1.0))
        throw std::runtime_error("McsTable: code rate out of (0, 1)");
      // Spectral efficiency grows with the index within each modulation
      // order. (Across the 16 -> 17 order crossover the standard table
      // itself dips by 0.004 bit/s/Hz, so no global claim is made.)
      if (i > 0 && entries_[i - 1].modulation_order == e.modulation_order &&
          !(e.spectral_efficiency > entries_[i - 1].spectral_efficiency))
        throw std::runtime_error("McsTable: spectral efficiency not increasing at index " +
                                 std::to_string(e.index));
    }
  }

 private:
  std::vector<McsEntry> entries_;
};

// SNR (dB) at which the Shannon rate equals the entry's spectral
// efficiency; the anchor point of the synthetic BLER curve.
inline double shannon_threshold_db(const McsEntry& entry) {
  return 10.0 * std::log10(std::exp2(entry.spectral_efficiency) - 1.0);
}

// Logistic block-error probability: 0.5 at the Shannon threshold, slope 2
// per dB, decreasing in SNR.
inline double bler_probability(double snr_db, const McsEntry& entry) {
  constexpr double slope_per_db = 2.0;
  const double x = slope_per_db * (snr_db - shannon_threshold_db(entry));
  return 1.0 / (1.0 + std::exp(x));
}

// Ring of recent transport-block outcomes, spanning a fixed slot window.
class BlerWindow {
 public:
  explicit BlerWindow(std::int64_t span_slots = 200) : span_slots_(span_slots) {
    if (span_slots <= 0) throw std::invalid_argument("BlerWindow: span must be positive");
  }

  void record(std::int64_t slot, bool failed) {
    samples_.emplace_back(slot, failed);
    evict(slot);
  }

  void evict(std::int64_t now) {
    while (!samples_.empty() && samples_.front().first <= now - span_slots_)
      samples_.pop_front();
  }

  bool empty() const { return samples_.empty(); }
  std::size_t count() const { return samples_.size(); }

  double estimate() const {
    if (samples_.empty()) throw std::logic_error("BlerWindow::estimate: no samples");
    std::size_t failures = 0;
    for (const auto& [slot, failed] : samples_)
      if (failed) ++failures;
    return static_cast<double>(failures) / static_cast<double>(samples_.size());
  }

  std::int64_t span_slots() const { return span_slots_; }

 private:
  std::int64_t span_slots_;
  std::deque<std::pair<std::int64_t, bool>> samples_;
};

inline int clamp_mcs(int index, int lo = kMcsMin, int hi = kMcsMax) {
  return index < lo ? lo : (index > hi ? hi : index);
}

// One BLER-driven adaptation step: +1 below the deadband, -1 above it,
// hold inside, clamped to the operational range.
inline int adapt_mcs_bler(int current, double window_bler, int lo = kMcsMin, int hi = kMcsMax) {
  if (!(window_bler >= 0.0 && window_bler <= 1.0))
    throw std::invalid_argument("adapt_mcs_bler: BLER estimate outside [0, 1]");
  int next = current;
  if (window_bler < kBlerStepUpBelow)
    ++next;
  else if (window_bler > kBlerStepDownAbove)
    --next;
  return clamp_mcs(next, lo, hi);
}

// Coarse MCS choice from the reported wideband RSRP.
inline int nominal_mcs_from_rsrp(double rsrp_dbm) {
  if (rsrp_dbm > -102.0) return 25;
  if (rsrp_dbm < -115.0) return 10;
  return 15;
}

// Bounded catch-up towards the nominal index: move by 6 when more than 6
// away, otherwise leave the BLER loop in charge.
inline int fast_adapt(int current, int nominal, int lo = kMcsMin, int hi = kMcsMax) {
  int next = current;
  if (current - nominal > 6)
    next = current - 6;
  else if (nominal - current > 6)
    next = current + 6;
  return clamp_mcs(next, lo, hi);
}

// Stop-and-wait HARQ with up to 3 same-MCS retransmissions per transport
// block, then discard.
struct HarqProcess {
  bool pending = false;  // a failed block is waiting for retransmission
  int mcs = 0;           // MCS of the block in flight
  int retries_used = 0;
};

enum class HarqAction { kDelivered, kRetransmit, kDiscarded };

inline constexpr int kHarqMaxRetx = 3;

// Applies one transmission outcome to the process. `mcs` is the index the
// block was sent with (ignored for a pending block, which keeps its own).
inline HarqAction harq_step(HarqProcess& harq, int mcs, bool success) {
  if (!harq.pending) {
    harq.mcs = mcs;
    harq.retries_used = 0;
  }
  if (success) {
    harq.pending = false;
    harq.retries_used = 0;
    return HarqAction::kDelivered;
  }
  if (harq.retries_used < kHarqMaxRetx) {
    harq.pending = true;
    ++harq.retries_used;
    return HarqAction::kRetransmit;
  }
  harq.pending = false;
  harq.retries_used = 0;
  return HarqAction::kDiscarded;
}

// Transport-block capacity of one slot: n_prb PRBs of 12 subcarriers, each
// carrying n_symbols data symbols at the entry's spectral efficiency,
// rounded down to whole bits.
inline std::int64_t slot_throughput_bits(const McsEntry& entry, int n_prb, int n_symbols) {
  if (n_prb <= 0 || n_symbols <= 0)
    throw std::invalid_argument("slot_throughput_bits: PRB and symbol counts must be positive");
  const double bits = static_cast<double>(n_prb) * 12.0 * static_cast<double>(n_symbols) *
                      entry.spectral_efficiency;
  return static_cast<std::int64_t>(bits);
}

// Fraction of downlink resource elements consumed by reference signals and
// control, per the standard peak-rate accounting for FR1 downlink.
inline constexpr double kDlOverhead = 0.14;

// Sustained downlink rate in Mbit/s for a TDD pattern that carries data on
// dl_slots of every period_slots slots, derated by the control/reference
// overhead share.
inline double sustained_rate_mbps(const McsEntry& entry, int n_prb, int n_symbols, int dl_slots,
                                  int period_slots, double slot_duration_ms,
                                  double dl_overhead = kDlOverhead) {
  if (dl_slots < 0 || period_slots <= 0 || dl_slots > period_slots)
    throw std::invalid_argument("sustained_rate_mbps: bad TDD split");
  if (!(slot_duration_ms > 0.0))
    throw std::invalid_argument("sustained_rate_mbps: slot duration must be positive");
  if (!(dl_overhead >= 0.0 && dl_overhead < 1.0))
    throw std::invalid_argument("sustained_rate_mbps: overhead outside [0, 1)");
  const double bits_per_period = static_cast<double>(slot_throughput_bits(entry, n_prb, n_symbols)) *
                                 static_cast<double>(dl_slots) * (1.0 - dl_overhead);
  const double period_s = static_cast<double>(period_slots) * slot_duration_ms * 1e-3;
  return bits_per_period / period_s / 1e6;
}

}  // namespace risim
