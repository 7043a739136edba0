#include "qtk/rcs.hpp"

#include <algorithm>
#include <numeric>

#include "qtk/errors.hpp"

namespace qtk {

std::vector<std::size_t> sample_subset(Stream& s, std::size_t d, std::size_t m) {
  if (m < 1 || m > d)
    throw ParamError("sample_subset: mu*d=" + std::to_string(m) + " not in [1," +
                     std::to_string(d) + "]");
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  if (m == d) return idx;
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + s.below(d - i)]);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RcsQuantizer::RcsQuantizer(std::size_t n, std::shared_ptr<const CoordinateCodec> codec,
                           std::size_t mu_d, FillMode mode, bool rotate, std::string name)
    : n_(n),
      d_(rotate ? next_pow2(n) : n),
      codec_(std::move(codec)),
      mu_d_(mu_d),
      mode_(mode),
      rotate_(rotate),
      name_(std::move(name)) {
  if (n_ == 0) throw ParamError(name_ + ": dimension must be positive");
  if (mu_d_ < 1 || mu_d_ > d_)
    throw ParamError(name_ + ": sample count " + std::to_string(mu_d_) + " not in [1," +
                     std::to_string(d_) + "]");
}

Vec RcsQuantizer::to_inner(std::span<const double> v, const SeedPath& path) const {
  if (v.size() != n_)
    throw ParamError(name_ + ": expected dimension " + std::to_string(n_) + ", got " +
                     std::to_string(v.size()));
  if (input_bound_ && norm2(v) > *input_bound_ * (1 + 1e-9))
    throw ContractViolation(name_ + ": input outside the l2 ball of radius " +
                            std::to_string(*input_bound_));
  if (!rotate_) return Vec(v.begin(), v.end());
  Padded p = pad_to_pow2(v);
  Stream s = path.child(Tag::Rotation).stream();
  return rotate(p.data, sample_signs(s, d_));
}

std::vector<std::size_t> RcsQuantizer::subset(const SeedPath& path) const {
  Stream s = path.child(Tag::Subset).stream();
  return sample_subset(s, d_, mu_d_);
}

BitString RcsQuantizer::encode(std::span<const double> x, std::span<const double>,
                               const SeedPath& path) const {
  Vec xr = to_inner(x, path);
  auto S = subset(path);
  Vec vals(S.size());
  for (std::size_t t = 0; t < S.size(); ++t) vals[t] = xr[S[t]];
  BitString out;
  codec_->encode(vals, S, path, out);
  return out;
}

Vec RcsQuantizer::decode(const BitString& msg, std::span<const double> side,
                         const SeedPath& path) const {
  Vec yr = side.empty() ? Vec(d_, 0.0) : to_inner(side, path);
  auto S = subset(path);
  Vec ys(S.size());
  for (std::size_t t = 0; t < S.size(); ++t) ys[t] = yr[S[t]];
  BitReader in(msg);
  Vec vals = codec_->decode(in, ys, S, path);
  const double inv_mu = static_cast<double>(d_) / static_cast<double>(mu_d_);
  Vec outr;
  if (mode_ == FillMode::ZeroFill) {
    outr.assign(d_, 0.0);
    for (std::size_t t = 0; t < S.size(); ++t) outr[S[t]] = inv_mu * vals[t];
  } else {
    outr = yr;
    if (mu_d_ == d_) {
      for (std::size_t t = 0; t < S.size(); ++t) outr[S[t]] = vals[t];
    } else {
      for (std::size_t t = 0; t < S.size(); ++t) outr[S[t]] = ys[t] + inv_mu * (vals[t] - ys[t]);
    }
  }
  if (!rotate_) return outr;
  Stream s = path.child(Tag::Rotation).stream();
  Vec out = unrotate(outr, sample_signs(s, d_));
  out.resize(n_);
  return out;
}

}  // namespace qtk
