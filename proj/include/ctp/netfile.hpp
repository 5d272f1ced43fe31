#pragma once

#include <string>
#include <string_view>

#include "ctp/semibn.hpp"

namespace ctp {

/// Parses the text net format:
///
///     # comment
///     variable rain { no, yes }
///     cpt rain { 0.8, 0.2 }
///     cpt wet | rain, sprinkler { ... }
///
/// Probabilities run over parent assignments with the first parent slowest,
/// then over child states. Variables get ids in declaration order. A
/// variable without a cpt line is an unspecified root. Errors are
/// ParseError with the offending line and column.
SemiBayesNet parse_net(std::string_view text);

/// Reads and parses a file; InputError when it cannot be read.
SemiBayesNet load_net(const std::string& path);

/// Inverse of parse_net for nets without parameters or auxiliary items.
/// Values are printed with 17 significant digits so parsing is exact.
std::string print_net(const SemiBayesNet& n);

}  // namespace ctp
