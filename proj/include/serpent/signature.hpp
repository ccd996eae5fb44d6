#pragma once

#include "serpent/env.hpp"
#include "serpent/robot.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace serpent {

/// Beam letter with crossing direction: +1 for a left-to-right crossing
/// (increasing x), -1 for the inverse letter.
struct SignedLetter {
  int letter = 0;
  int sign = 1;

  SignedLetter inverse() const { return {letter, -sign}; }
  bool cancels(const SignedLetter& o) const { return letter == o.letter && sign == -o.sign; }
  auto operator<=>(const SignedLetter&) const = default;
};

using Word = std::vector<SignedLetter>;

/// Free reduction: cancels adjacent (l, l^-1) pairs until none remain.
Word reduce_word(std::span<const SignedLetter> word);
/// Reverses the word and flips every sign.
Word inverse_word(std::span<const SignedLetter> word);

/// Reduced word identifying the homotopy class of a planar curve.
class HSignature {
 public:
  HSignature() = default;
  /// Reduces `word` on construction.
  explicit HSignature(std::span<const SignedLetter> word) : word_(reduce_word(word)) {}
  HSignature(std::initializer_list<SignedLetter> word) : HSignature(std::span<const SignedLetter>(word.begin(), word.size())) {}

  const Word& word() const { return word_; }
  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }

  HSignature inverse() const;
  /// reduce(this . other)
  HSignature concat(const HSignature& other) const;
  bool is_suffix_of(const HSignature& other) const;
  /// e.g. "l0 l3' " style: `l<letter>` with a trailing `'` for inverse letters; "-" when empty.
  std::string str() const;

  auto operator<=>(const HSignature&) const = default;

 private:
  Word word_;
};

struct HSignatureHash {
  std::size_t operator()(const HSignature& s) const;
};

/// Crossings of the segment a -> b with the beams, ordered along the segment.
/// A point with x exactly on a beam line counts as the right side.
void segment_crossings(std::span<const Beam> beams, const Vec2& a, const Vec2& b, Word& out);

/// Signature of a polyline (>= 2 points).
HSignature signature_of_polyline(std::span<const Beam> beams, std::span<const Vec2> pts);
/// Signature of the robot body projected onto the x-z plane, base to tip.
HSignature signature_of_body(std::span<const Beam> beams, const BodyPoints& body);
HSignature signature_of_state(const RobotSpec& spec, std::span<const Beam> beams, const Configuration& c);

/// Class still to be traversed from a state: reduce(inverse(state) . goal).
HSignature remainder_signature(const HSignature& state_sig, const HSignature& goal_sig);

}  // namespace serpent
