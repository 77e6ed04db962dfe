#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace votebound {

/// Invalid configuration: mismatched sizes, out-of-range parameters,
/// malformed input files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A bound's hypothesis does not hold (typically a first moment <= 0).
struct BoundUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal invariant that should hold by construction was observed
/// broken; indicates a bug or numerically inconsistent input.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File parse failure carrying a 1-based location.
struct ParseError : ConfigError {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int line_, int column_ = 0)
      : ConfigError("line " + std::to_string(line_) +
                    (column_ > 0 ? ", column " + std::to_string(column_) : "") +
                    ": " + msg),
        line(line_),
        column(column_) {}
};

enum class LabelKind { binary, multiclass, multilabel };

std::string to_string(LabelKind kind);
LabelKind label_kind_from_string(const std::string& name);

/// Output space description. `class_count` is Q; the binary kind fixes the
/// labels to {-1,+1} and Q to 2.
struct LabelSpace {
  LabelKind kind = LabelKind::multiclass;
  int class_count = 2;

  void validate() const;
};

using BitVector = std::vector<std::uint8_t>;

/// One class-valued or set-valued label. `cls` holds a class index in 1..Q
/// (multiclass) or a sign in {-1,+1} (binary); `bits` holds the multilabel
/// bit vector, index 0 = label 1.
struct Label {
  int cls = 0;
  BitVector bits;

  bool operator==(const Label& other) const = default;
};

/// True iff `label` is a valid target for `space`.
bool label_valid(const Label& label, const LabelSpace& space);

std::string to_string(const Label& label, const LabelSpace& space);

}  // namespace votebound
