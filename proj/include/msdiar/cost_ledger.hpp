#pragma once

#include <cstdint>

namespace msdiar {

// Software operation counters for one clustering step. Kernels take a
// nullable CostLedger*; a null ledger turns counting off.
struct CostLedger {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;
  std::uint64_t divs = 0;  // divisions and square roots
  std::uint64_t comparisons = 0;
  std::uint64_t eig_sweep_ops = 0;  // every arithmetic op inside the eigensolver

  std::uint64_t total() const {
    return adds + muls + divs + comparisons + eig_sweep_ops;
  }

  CostLedger& operator+=(const CostLedger& other) {
    adds += other.adds;
    muls += other.muls;
    divs += other.divs;
    comparisons += other.comparisons;
    eig_sweep_ops += other.eig_sweep_ops;
    return *this;
  }

  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

namespace ops {

inline void add(CostLedger* l, std::uint64_t n) { if (l) l->adds += n; }
inline void mul(CostLedger* l, std::uint64_t n) { if (l) l->muls += n; }
inline void div(CostLedger* l, std::uint64_t n) { if (l) l->divs += n; }
inline void cmp(CostLedger* l, std::uint64_t n) { if (l) l->comparisons += n; }
inline void eig(CostLedger* l, std::uint64_t n) { if (l) l->eig_sweep_ops += n; }

// n multiply-adds (a dot product of length n costs n muls and n-1 adds,
// counted here as n of each).
inline void fma(CostLedger* l, std::uint64_t n) {
  if (l) {
    l->adds += n;
    l->muls += n;
  }
}

}  // namespace ops
}  // namespace msdiar
