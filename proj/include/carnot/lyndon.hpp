#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "carnot/common.hpp"
#include "carnot/tensor.hpp"

namespace carnot {

/// Graded dimensions of the step-N free Lie algebra over R^d.
struct Dimensions {
  int d = 0;
  int N = 0;
  std::vector<std::uint64_t> witt;      // witt[k-1] = dimension of level k, k = 1..N
  std::uint64_t dim_group = 0;          // sum of the graded dimensions
  std::uint64_t homogeneous_dim = 0;    // sum of k * witt_k
};

namespace detail {

inline int moebius(int n) {
  int mu = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;  // squared factor
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

inline std::uint64_t checked_pow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && r > (UINT64_MAX / 4) / base)
      throw std::overflow_error("witt_dimensions: d^N exceeds representable range");
    r *= base;
  }
  return r;
}

}  // namespace detail

/// Necklace-counting formula: witt_k = (1/k) sum_{m | k} mu(m) d^{k/m}.
inline Dimensions witt_dimensions(int d, int N) {
  require(d >= 1 && N >= 1, "witt_dimensions: need d >= 1, N >= 1");
  Dimensions out;
  out.d = d;
  out.N = N;
  out.witt.resize(N);
  for (int k = 1; k <= N; ++k) {
    std::int64_t acc = 0;
    for (int m = 1; m <= k; ++m) {
      if (k % m != 0) continue;
      acc += static_cast<std::int64_t>(detail::moebius(m)) *
             static_cast<std::int64_t>(detail::checked_pow(static_cast<std::uint64_t>(d), k / m));
    }
    out.witt[k - 1] = static_cast<std::uint64_t>(acc / k);
    out.dim_group += out.witt[k - 1];
    out.homogeneous_dim += static_cast<std::uint64_t>(k) * out.witt[k - 1];
  }
  return out;
}

/// Lyndon words over {0..d-1} and their standard bracketings, expanded as
/// tensor-level coefficient arrays.  Shared, lazily built, cached per (d,N).
class LyndonBasis {
 public:
  using Word = std::vector<int>;

  int dim() const { return d_; }
  int depth() const { return n_; }

  /// Lyndon words of length k (1-based level), in lexicographic order.
  const std::vector<Word>& words(int k) const { return words_[k - 1]; }

  /// Dense level-k array of the standard bracketing of words(k)[idx].
  const std::vector<double>& bracket_tensor(int k, std::size_t idx) const {
    return brackets_[k - 1][idx];
  }

  /// Flat word index into a level-k array.
  std::size_t word_index(const Word& w) const {
    std::size_t idx = 0;
    for (int c : w) idx = idx * static_cast<std::size_t>(d_) + static_cast<std::size_t>(c);
    return idx;
  }

  static const LyndonBasis& get(int d, int N);

 private:
  LyndonBasis(int d, int N) : d_(d), n_(N) {
    build_words();
    build_brackets();
  }

  // Duval's algorithm: all Lyndon words of length <= N in lexicographic order.
  void build_words() {
    words_.resize(n_);
    Word w{0};
    words_[0].push_back(w);
    while (true) {
      Word x;
      x.reserve(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) x.push_back(w[static_cast<std::size_t>(i) % w.size()]);
      while (!x.empty() && x.back() == d_ - 1) x.pop_back();
      if (x.empty()) break;
      ++x.back();
      words_[x.size() - 1].push_back(x);
      w = x;
    }
  }

  // Standard factorization w = u v with v the longest proper Lyndon suffix;
  // bracket tensor [T(u), T(v)] built recursively.
  void build_brackets() {
    brackets_.resize(n_);
    std::map<Word, std::vector<double>> memo;
    for (int k = 1; k <= n_; ++k) {
      brackets_[k - 1].reserve(words_[k - 1].size());
      for (const auto& w : words_[k - 1]) brackets_[k - 1].push_back(expand(w, memo));
    }
  }

  bool is_lyndon(const Word& w) const {
    for (std::size_t i = 1; i < w.size(); ++i) {
      const Word suffix(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
      if (!std::lexicographical_compare(w.begin(), w.end(), suffix.begin(), suffix.end()))
        return false;
    }
    return true;
  }

  std::vector<double> expand(const Word& w, std::map<Word, std::vector<double>>& memo) {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    std::vector<double> out;
    if (w.size() == 1) {
      out.assign(static_cast<std::size_t>(d_), 0.0);
      out[static_cast<std::size_t>(w[0])] = 1.0;
    } else {
      // longest proper Lyndon suffix
      std::size_t split = 0;
      for (std::size_t i = 1; i < w.size(); ++i) {
        const Word suffix(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
        if (is_lyndon(suffix)) {
          split = i;
          break;
        }
      }
      const Word u(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(split));
      const Word v(w.begin() + static_cast<std::ptrdiff_t>(split), w.end());
      out = commutator(expand(u, memo), expand(v, memo));
    }
    memo.emplace(w, out);
    return out;
  }

  std::vector<double> commutator(const std::vector<double>& a,
                                 const std::vector<double>& b) const {
    const std::size_t na = a.size(), nb = b.size();
    std::vector<double> out(na * nb, 0.0);
    for (std::size_t p = 0; p < na; ++p) {
      if (a[p] == 0.0) continue;
      for (std::size_t q = 0; q < nb; ++q) {
        if (b[q] == 0.0) continue;
        out[p * nb + q] += a[p] * b[q];
        out[q * na + p] -= a[p] * b[q];
      }
    }
    return out;
  }

  int d_;
  int n_;
  std::vector<std::vector<Word>> words_;                  // per level
  std::vector<std::vector<std::vector<double>>> brackets_;  // per level, per word
};

inline const LyndonBasis& LyndonBasis::get(int d, int N) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<LyndonBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, N);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::unique_ptr<LyndonBasis>(new LyndonBasis(d, N))).first;
  }
  return *it->second;
}

/// Element of the free Lie algebra in Lyndon-basis coordinates.
/// levels[k-1] holds one coefficient per Lyndon word of length k (lex order).
struct LieElement {
  int d = 0;
  int N = 0;
  std::vector<std::vector<double>> levels;

  static LieElement zero(int d, int N) {
    LieElement e;
    e.d = d;
    e.N = N;
    const auto& basis = LyndonBasis::get(d, N);
    e.levels.resize(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) e.levels[k - 1].assign(basis.words(k).size(), 0.0);
    return e;
  }

  /// Lie element with only a level-1 part.
  static LieElement from_level1(const std::vector<double>& v, int N) {
    LieElement e = zero(static_cast<int>(v.size()), N);
    e.levels[0] = v;
    return e;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& lv : levels)
      for (double x : lv) m = std::max(m, std::abs(x));
    return m;
  }
};

/// Expand Lyndon coordinates into the tensor algebra.
inline TensorSeries lie_to_tensor(const LieElement& e) {
  const auto& basis = LyndonBasis::get(e.d, e.N);
  TensorSeries out(e.d, e.N);
  for (int k = 1; k <= e.N; ++k) {
    auto& lv = out.level(k);
    for (std::size_t i = 0; i < e.levels[k - 1].size(); ++i) {
      const double c = e.levels[k - 1][i];
      if (c == 0.0) continue;
      const auto& bt = basis.bracket_tensor(k, i);
      for (std::size_t j = 0; j < bt.size(); ++j) lv[j] += c * bt[j];
    }
  }
  return out;
}

struct LieExtraction {
  LieElement coeffs;
  double residual = 0.0;  // max-abs of the part outside the free Lie subspace
};

/// Project a tensor with zero scalar part onto the Lyndon basis.  Uses the
/// triangularity of standard bracketings (the word itself is the lex-least
/// word of its expansion, with coefficient 1), so a greedy sweep in lex order
/// is exact.  The residual measures the non-Lie component.
inline LieExtraction tensor_to_lie(const TensorSeries& t) {
  const int d = t.dim(), N = t.depth();
  const auto& basis = LyndonBasis::get(d, N);
  LieExtraction out;
  out.coeffs = LieElement::zero(d, N);
  for (int k = 1; k <= N; ++k) {
    std::vector<double> work = t.level(k);
    const auto& words = basis.words(k);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const std::size_t wi = basis.word_index(words[i]);
      const double c = work[wi];
      out.coeffs.levels[k - 1][i] = c;
      if (c == 0.0) continue;
      const auto& bt = basis.bracket_tensor(k, i);
      for (std::size_t j = 0; j < bt.size(); ++j) work[j] -= c * bt[j];
    }
    for (double x : work) out.residual = std::max(out.residual, std::abs(x));
  }
  return out;
}

}  // namespace carnot
