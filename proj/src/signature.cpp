#include "serpent/signature.hpp"

#include <algorithm>
#include <stdexcept>

namespace serpent {

Word reduce_word(std::span<const SignedLetter> word) {
  Word out;
  out.reserve(word.size());
  for (const SignedLetter& l : word) {
    if (!out.empty() && out.back().cancels(l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word inverse_word(std::span<const SignedLetter> word) {
  Word out;
  out.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back(it->inverse());
  return out;
}

HSignature HSignature::inverse() const {
  HSignature s;
  s.word_ = inverse_word(word_);
  return s;
}

HSignature HSignature::concat(const HSignature& other) const {
  Word joined = word_;
  joined.insert(joined.end(), other.word_.begin(), other.word_.end());
  return HSignature(joined);
}

bool HSignature::is_suffix_of(const HSignature& other) const {
  if (word_.size() > other.word_.size()) return false;
  return std::equal(word_.begin(), word_.end(), other.word_.end() - static_cast<std::ptrdiff_t>(word_.size()));
}

std::string HSignature::str() const {
  if (word_.empty()) return "-";
  std::string s;
  for (const SignedLetter& l : word_) {
    if (!s.empty()) s += ' ';
    s += 'l' + std::to_string(l.letter);
    if (l.sign < 0) s += '\'';
  }
  return s;
}

std::size_t HSignatureHash::operator()(const HSignature& s) const {
  std::size_t h = 1469598103934665603ull;
  for (const SignedLetter& l : s.word()) {
    h ^= static_cast<std::size_t>(l.letter * 2 + (l.sign > 0 ? 1 : 0));
    h *= 1099511628211ull;
  }
  return h ^ s.size();
}

void segment_crossings(std::span<const Beam> beams, const Vec2& a, const Vec2& b, Word& out) {
  struct Hit {
    double t;
    SignedLetter letter;
  };
  std::vector<Hit> hits;  // allocates only when something is crossed
  for (const Beam& beam : beams) {
    const double bx = beam.anchor.x();
    const bool a_right = a.x() >= bx;
    const bool b_right = b.x() >= bx;
    if (a_right == b_right) continue;
    const double t = (bx - a.x()) / (b.x() - a.x());
    const double z = a.y() + t * (b.y() - a.y());
    if (z < beam.anchor.y() || z > beam.top) continue;
    hits.push_back({t, {beam.letter, b_right ? 1 : -1}});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) {
    if (x.t != y.t) return x.t < y.t;
    return x.letter.letter < y.letter.letter;
  });
  for (const Hit& h : hits) out.push_back(h.letter);
}

HSignature signature_of_polyline(std::span<const Beam> beams, std::span<const Vec2> pts) {
  if (pts.size() < 2) throw std::invalid_argument("polyline needs at least two points");
  Word raw;
  for (std::size_t i = 1; i < pts.size(); ++i) segment_crossings(beams, pts[i - 1], pts[i], raw);
  return HSignature(raw);
}

HSignature signature_of_body(std::span<const Beam> beams, const BodyPoints& body) {
  Word raw;
  for (std::size_t i = 1; i < body.size(); ++i) segment_crossings(beams, project(body[i - 1]), project(body[i]), raw);
  return HSignature(raw);
}

HSignature signature_of_state(const RobotSpec& spec, std::span<const Beam> beams, const Configuration& c) {
  return signature_of_body(beams, forward_kinematics(spec, c));
}

HSignature remainder_signature(const HSignature& state_sig, const HSignature& goal_sig) {
  return state_sig.inverse().concat(goal_sig);
}

}  // namespace serpent
