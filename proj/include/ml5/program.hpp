#pragma once

#include <string>
#include <vector>

#include "ml5/syntax.hpp"

namespace ml5 {

enum class Mode { Classic, Revised };

struct SourceDecl {
  std::string name;
  Type type;
  World world;
  Term term;
  Pos pos;
};

/// Parsed `.ml5` file: optional `world` declarations and the ordered
/// `name : Type [world] = term` declarations.
struct SourceProgram {
  std::vector<std::string> worlds;
  std::vector<SourceDecl> decls;

  friend bool operator==(const SourceProgram& a, const SourceProgram& b);
};

}  // namespace ml5
