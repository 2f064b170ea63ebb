#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reclab/errors.hpp"

namespace reclab {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1ull << 24;

/// One-sided shift space: a full shift on `alphabet_size` symbols, or a
/// subshift of finite type given by a 0/1 transition matrix. Transition
/// matrices must be primitive (some power strictly positive); this is checked
/// at construction.
class SymbolicSystem {
 public:
  static SymbolicSystem full_shift(int alphabet_size);
  static SymbolicSystem sft(int alphabet_size, std::vector<std::vector<int>> transition);

  int alphabet_size() const { return alphabet_; }
  bool is_full_shift() const { return transition_.empty(); }

  bool allowed(int from, int to) const {
    return transition_.empty() ? true : transition_[static_cast<std::size_t>(from) * alphabet_ + to] != 0;
  }

  bool word_admissible(const std::vector<int>& symbols) const;

 private:
  SymbolicSystem(int alphabet, std::vector<std::uint8_t> transition)
      : alphabet_(alphabet), transition_(std::move(transition)) {}

  int alphabet_;
  std::vector<std::uint8_t> transition_;  // empty for the full shift
};

/// A finite admissible word; stands for the cylinder set it spans.
struct Word {
  std::vector<int> symbols;

  Word() = default;
  explicit Word(std::vector<int> s) : symbols(std::move(s)) {}

  int length() const { return static_cast<int>(symbols.size()); }
  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;

  std::string str() const;                         // "0101" for small alphabets
  static Word from_string(const std::string& s);   // digits only
};

/// A point of the shift space, defined either by an eventually periodic
/// symbol sequence or by a deterministic stream generator.
class PointSpec {
 public:
  enum class Kind { EventuallyPeriodic, Stream };

  static PointSpec periodic(std::vector<int> period, std::vector<int> preperiod = {});
  // generators: "iid-uniform", "thue-morse"
  static PointSpec stream(std::string generator, std::uint64_t seed);

  Kind kind() const { return kind_; }
  const std::vector<int>& preperiod() const { return preperiod_; }
  const std::vector<int>& period() const { return period_; }
  const std::string& generator() const { return generator_; }
  std::uint64_t seed() const { return seed_; }

  /// First n symbols. Pure: recomputed deterministically on every call.
  std::vector<int> prefix(int n, const SymbolicSystem& system) const;

  void validate(const SymbolicSystem& system) const;

 private:
  PointSpec() = default;
  Kind kind_ = Kind::EventuallyPeriodic;
  std::vector<int> preperiod_, period_;
  std::string generator_;
  std::uint64_t seed_ = 0;
};

/// A hole: a finite prefix-free set of admissible words (union of cylinders).
struct HoleSpec {
  std::vector<Word> cylinders;  // sorted, prefix-free
  int depth = 0;                // max word length

  /// Normalizes: sorts, removes duplicates and words that extend a shorter
  /// member (the shorter word already covers them as a set).
  static HoleSpec normalized(std::vector<Word> words, const SymbolicSystem& system);
};

enum class Side { Left, Right };

struct PrimePeriodResult {
  enum class Status { Found, NoneWithinBound, NotApplicable };
  Status status = Status::NotApplicable;
  std::optional<int> period;
};

/// All admissible words of length n, lexicographically sorted.
std::vector<Word> enumerate_join(const SymbolicSystem& system, int n,
                                 std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// The n-cylinder containing z (its first n symbols).
Word cylinder_around(const PointSpec& z, int n, const SymbolicSystem& system);

/// Minimal p <= bound with shift^p(z) = z, for purely periodic z. Stream
/// points and points with a preperiod report NotApplicable.
PrimePeriodResult prime_period(const PointSpec& z, int bound, const SymbolicSystem& system);

/// The cylinder of the first n+u*p symbols of a p-periodic z; as a set this
/// equals the intersection of the n-cylinder with its first u preimages
/// under shift^p.
Word intersected_cylinder(const PointSpec& z, int n, int p, int u, const SymbolicSystem& system);

/// Length-j cylinder cover of U (Side::Right: words meeting U; Side::Left:
/// words meeting the forward image of U under shift^(depth-j)).
std::vector<Word> outer_j_approximation(const HoleSpec& hole, int j, Side side,
                                        const SymbolicSystem& system,
                                        std::uint64_t enumeration_cap = kDefaultEnumerationCap);

}  // namespace reclab
