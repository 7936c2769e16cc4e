#ifndef PLANSEL_BUILTIN_DOMAINS_H_
#define PLANSEL_BUILTIN_DOMAINS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plansel/pddl.h"

namespace plansel {

// Names of the domains compiled into the library: blocksworld-4ops, grid,
// logistics-strips, tetris.
std::vector<std::string> BuiltinDomainNames();

std::optional<std::string_view> BuiltinDomainText(std::string_view name);

// Resolves a built-in domain name first, then falls back to reading a file.
Domain LoadDomain(const std::string& name_or_path);

}  // namespace plansel

#endif  // PLANSEL_BUILTIN_DOMAINS_H_
