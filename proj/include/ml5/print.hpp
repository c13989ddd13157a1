#pragma once

#include <string>
#include <vector>

#include "ml5/l5.hpp"
#include "ml5/program.hpp"
#include "ml5/syntax.hpp"

namespace ml5 {

/// Concrete syntax printers. Output re-parses to the same tree (up to
/// positions and binder hints); world variables are named from their binder
/// hints, renamed apart from sites and enclosing binders.
std::string to_string(const World& w, const std::vector<std::string>& names = {});
std::string to_string(const Type& a, const std::vector<std::string>& names = {});
std::string to_string(const Term& t, const std::vector<std::string>& names = {});
std::string to_string(const SourceProgram& p);

std::string to_string(const l5::Term& t, const std::vector<std::string>& names = {});
std::string to_string(const l5::Program& p);

std::string quote_string(const std::string& s);

}  // namespace ml5
