#include "votebound/types.hpp"

namespace votebound {

std::string to_string(LabelKind kind) {
  switch (kind) {
    case LabelKind::binary: return "binary";
    case LabelKind::multiclass: return "multiclass";
    case LabelKind::multilabel: return "multilabel";
  }
  return "unknown";
}

LabelKind label_kind_from_string(const std::string& name) {
  if (name == "binary") return LabelKind::binary;
  if (name == "multiclass") return LabelKind::multiclass;
  if (name == "multilabel") return LabelKind::multilabel;
  throw ConfigError("unknown label kind: " + name);
}

void LabelSpace::validate() const {
  if (kind == LabelKind::binary) {
    if (class_count != 2) {
      throw ConfigError("binary label space fixes Q to 2, got " +
                        std::to_string(class_count));
    }
    return;
  }
  if (class_count < 2) {
    throw ConfigError("label space requires Q >= 2, got " +
                      std::to_string(class_count));
  }
}

bool label_valid(const Label& label, const LabelSpace& space) {
  switch (space.kind) {
    case LabelKind::binary:
      return label.bits.empty() && (label.cls == -1 || label.cls == 1);
    case LabelKind::multiclass:
      return label.bits.empty() && label.cls >= 1 &&
             label.cls <= space.class_count;
    case LabelKind::multilabel: {
      if (label.bits.size() != static_cast<std::size_t>(space.class_count)) {
        return false;
      }
      for (auto b : label.bits) {
        if (b != 0 && b != 1) return false;
      }
      return true;
    }
  }
  return false;
}

std::string to_string(const Label& label, const LabelSpace& space) {
  if (space.kind == LabelKind::multilabel) {
    std::string s;
    s.reserve(label.bits.size());
    for (auto b : label.bits) s.push_back(b ? '1' : '0');
    return s;
  }
  if (space.kind == LabelKind::binary && label.cls > 0) return "+1";
  return std::to_string(label.cls);
}

}  // namespace votebound
