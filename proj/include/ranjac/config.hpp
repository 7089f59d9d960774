#ifndef RANJAC_CONFIG_HPP
#define RANJAC_CONFIG_HPP

// Global sign conventions and limits. Every module refers to these; do not
// introduce a second convention locally.
//
//   * differentials have degree +1
//   * d_{C[n]} = (-1)^n d_C
//   * d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy
//   * swap s(x (x) y) = (-1)^{|x||y|} y (x) x
//   * Sym sorting swap: (-1)^{|a||b|}, odd generators square to zero
//   * wedge sorting swap: -(-1)^{|a||b|}, even generators square to zero
//   * decalage Sym^n(C[1]) -> Λ^n(C)[n]:
//       v_1...v_n  |->  (-1)^{sum_i (n-i) p_i} v_1∧...∧v_n,  v_i in C^{p_i}

namespace ranjac {

// Degree window for graded spaces; operations producing components outside
// [-kDegreeWindow, kDegreeWindow] fail loudly instead of blowing up.
inline constexpr int kDegreeWindow = 16;

inline constexpr int shift_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

inline constexpr int koszul_sign(int a, int b) {
  return ((a & 1) && (b & 1)) ? -1 : 1;
}

} // namespace ranjac

#endif
