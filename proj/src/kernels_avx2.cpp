#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>
#include <cstring>

#include "kernels_detail.hpp"
#include "mcpd/kernels.hpp"
#include "mcpd/rng.hpp"

// Four cells per iteration, one 64-bit lane each. Every floating-point
// operation is issued in the same order as the scalar reference, so the two
// backends agree bit for bit. Lattice edge columns and the rare draw that
// rounds up against the roulette total go through the shared scalar cell
// routine.

namespace mcpd::kernels {

namespace {

// Widens four consecutive strategy bytes to 64-bit lanes.
inline __m256i load4u8(const Strategy* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(v)));
}

// 64-bit a*b (low half), which AVX2 lacks natively.
inline __m256i mullo64(__m256i a, __m256i b) {
  const __m256i a_hi = _mm256_srli_epi64(a, 32);
  const __m256i b_hi = _mm256_srli_epi64(b, 32);
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i cross =
      _mm256_add_epi64(_mm256_mul_epu32(a, b_hi), _mm256_mul_epu32(a_hi, b));
  return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64v(__m256i z) {
  z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 30)),
              _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ULL)));
  z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 27)),
              _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBULL)));
  return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

// Exact u64 -> double for values below 2^53 (the mix output shifted by 11).
inline __m256d u64_to_pd(__m256i x) {
  const __m256d two84 = _mm256_set1_pd(0x1.0p84);
  const __m256d two52 = _mm256_set1_pd(0x1.0p52);
  __m256i hi = _mm256_srli_epi64(x, 32);
  hi = _mm256_or_si256(hi, _mm256_castpd_si256(two84));
  const __m256i lo = _mm256_blend_epi32(x, _mm256_castpd_si256(two52), 0xAA);
  const __m256d corrected = _mm256_sub_pd(_mm256_castsi256_pd(hi),
                                          _mm256_set1_pd(0x1.0p84 + 0x1.0p52));
  return _mm256_add_pd(corrected, _mm256_castsi256_pd(lo));
}

// Exact u64 -> double for values below 2^52 (neighbor counts).
inline __m256d small_u64_to_pd(__m256i x) {
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  const __m256i shifted = _mm256_or_si256(x, _mm256_castpd_si256(magic));
  return _mm256_sub_pd(_mm256_castsi256_pd(shifted), magic);
}

void payoff_field(const Strategy* cells, int side, double b, double* out) {
  const __m256i one64 = _mm256_set1_epi64x(1);
  const __m256d bvec = _mm256_set1_pd(b);
  const __m256d onepd = _mm256_set1_pd(1.0);
  for (int r = 0; r < side; ++r) {
    const Strategy* crow = cells + static_cast<std::ptrdiff_t>(r) * side;
    const Strategy* cup =
        cells + static_cast<std::ptrdiff_t>(r == 0 ? side - 1 : r - 1) * side;
    const Strategy* cdn =
        cells + static_cast<std::ptrdiff_t>(r == side - 1 ? 0 : r + 1) * side;
    double* orow = out + static_cast<std::ptrdiff_t>(r) * side;

    orow[0] = detail::payoff_cell(cells, side, b, r, 0);
    int c = 1;
    for (; c + 3 <= side - 2; c += 4) {
      const __m256i cnt = _mm256_add_epi64(
          _mm256_add_epi64(load4u8(cup + c), load4u8(cdn + c)),
          _mm256_add_epi64(load4u8(crow + c - 1), load4u8(crow + c + 1)));
      const __m256i is_c = _mm256_cmpeq_epi64(load4u8(crow + c), one64);
      const __m256d factor =
          _mm256_blendv_pd(bvec, onepd, _mm256_castsi256_pd(is_c));
      _mm256_storeu_pd(orow + c, _mm256_mul_pd(small_u64_to_pd(cnt), factor));
    }
    for (; c < side; ++c) {
      orow[c] = detail::payoff_cell(cells, side, b, r, c);
    }
  }
}

void mc_round(const Strategy* cells, const double* payoffs, int side,
              std::uint64_t round_key, Strategy* next) {
  const __m256i lane_offsets = _mm256_set_epi64x(
      static_cast<long long>(6 * rng::kGamma),
      static_cast<long long>(4 * rng::kGamma),
      static_cast<long long>(2 * rng::kGamma), 0);
  const __m256d scale = _mm256_set1_pd(0x1.0p-53);
  const __m256d zero_pd = _mm256_setzero_pd();
  const __m256i zero_si = _mm256_setzero_si256();

  for (int r = 0; r < side; ++r) {
    const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(r) * side;
    const std::ptrdiff_t up =
        static_cast<std::ptrdiff_t>(r == 0 ? side - 1 : r - 1) * side;
    const std::ptrdiff_t dn =
        static_cast<std::ptrdiff_t>(r == side - 1 ? 0 : r + 1) * side;
    const double* prow = payoffs + row;
    const double* pup = payoffs + up;
    const double* pdn = payoffs + dn;
    const Strategy* crow = cells + row;
    const Strategy* cup = cells + up;
    const Strategy* cdn = cells + dn;

    next[row] = detail::mc_cell(cells, payoffs, side, round_key, r, 0);
    int c = 1;
    for (; c + 3 <= side - 2; c += 4) {
      const std::ptrdiff_t i0 = row + c;

      const __m256d u0 = _mm256_loadu_pd(prow + c);
      const __m256d uu = _mm256_loadu_pd(pup + c);
      const __m256d ud = _mm256_loadu_pd(pdn + c);
      const __m256d ul = _mm256_loadu_pd(prow + c - 1);
      const __m256d ur = _mm256_loadu_pd(prow + c + 1);

      const __m256d w0 = _mm256_and_pd(uu, _mm256_cmp_pd(uu, u0, _CMP_GE_OQ));
      const __m256d w1 = _mm256_and_pd(ud, _mm256_cmp_pd(ud, u0, _CMP_GE_OQ));
      const __m256d w2 = _mm256_and_pd(ul, _mm256_cmp_pd(ul, u0, _CMP_GE_OQ));
      const __m256d w3 = _mm256_and_pd(ur, _mm256_cmp_pd(ur, u0, _CMP_GE_OQ));

      const __m256d cs0 = u0;
      const __m256d cs1 = _mm256_add_pd(cs0, w0);
      const __m256d cs2 = _mm256_add_pd(cs1, w1);
      const __m256d cs3 = _mm256_add_pd(cs2, w2);
      const __m256d cs4 = _mm256_add_pd(cs3, w3);

      const std::uint64_t base =
          round_key +
          (2 * static_cast<std::uint64_t>(i0) + 1) * rng::kGamma;
      const __m256i keys = _mm256_add_epi64(
          _mm256_set1_epi64x(static_cast<long long>(base)), lane_offsets);
      const __m256i bits = _mm256_srli_epi64(mix64v(keys), 11);
      const __m256d unit = _mm256_mul_pd(u64_to_pd(bits), scale);
      const __m256d t = _mm256_mul_pd(unit, cs4);

      __m256i j = zero_si;
      j = _mm256_sub_epi64(
          j, _mm256_castpd_si256(_mm256_cmp_pd(cs0, t, _CMP_LE_OQ)));
      j = _mm256_sub_epi64(
          j, _mm256_castpd_si256(_mm256_cmp_pd(cs1, t, _CMP_LE_OQ)));
      j = _mm256_sub_epi64(
          j, _mm256_castpd_si256(_mm256_cmp_pd(cs2, t, _CMP_LE_OQ)));
      j = _mm256_sub_epi64(
          j, _mm256_castpd_si256(_mm256_cmp_pd(cs3, t, _CMP_LE_OQ)));

      const __m256i sself = load4u8(crow + c);
      __m256i sel = sself;
      sel = _mm256_blendv_epi8(sel, load4u8(cup + c),
                               _mm256_cmpgt_epi64(j, zero_si));
      sel = _mm256_blendv_epi8(sel, load4u8(cdn + c),
                               _mm256_cmpgt_epi64(j, _mm256_set1_epi64x(1)));
      sel = _mm256_blendv_epi8(sel, load4u8(crow + c - 1),
                               _mm256_cmpgt_epi64(j, _mm256_set1_epi64x(2)));
      sel = _mm256_blendv_epi8(sel, load4u8(crow + c + 1),
                               _mm256_cmpgt_epi64(j, _mm256_set1_epi64x(3)));

      const __m256d keep = _mm256_cmp_pd(cs4, zero_pd, _CMP_EQ_OQ);
      sel = _mm256_blendv_epi8(sel, sself, _mm256_castpd_si256(keep));

      alignas(32) std::uint64_t lanes[4];
      _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), sel);
      next[i0 + 0] = static_cast<Strategy>(static_cast<std::uint8_t>(lanes[0]));
      next[i0 + 1] = static_cast<Strategy>(static_cast<std::uint8_t>(lanes[1]));
      next[i0 + 2] = static_cast<Strategy>(static_cast<std::uint8_t>(lanes[2]));
      next[i0 + 3] = static_cast<Strategy>(static_cast<std::uint8_t>(lanes[3]));

      const __m256d over =
          _mm256_and_pd(_mm256_cmp_pd(t, cs4, _CMP_GE_OQ),
                        _mm256_cmp_pd(cs4, zero_pd, _CMP_GT_OQ));
      int em = _mm256_movemask_pd(over);
      while (em) {
        const int k = __builtin_ctz(static_cast<unsigned>(em));
        em &= em - 1;
        next[i0 + k] =
            detail::mc_cell(cells, payoffs, side, round_key, r, c + k);
      }
    }
    for (; c < side; ++c) {
      next[row + c] = detail::mc_cell(cells, payoffs, side, round_key, r, c);
    }
  }
}

std::int64_t cooperator_count(const Strategy* cells, std::int64_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;
  std::int64_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(cells + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::int64_t total = static_cast<std::int64_t>(lanes[0] + lanes[1] +
                                                 lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    total += static_cast<std::int64_t>(cells[i]);
  }
  return total;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2", payoff_field, mc_round, cooperator_count};
  return ops;
}

}  // namespace mcpd::kernels

#endif  // x86_64
