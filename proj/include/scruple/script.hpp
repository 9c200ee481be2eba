#pragma once

#include "scruple/diagnostics.hpp"
#include "scruple/world.hpp"

#include <optional>
#include <string_view>

namespace scruple {

struct ParseResult {
    std::optional<WorldModel> world;  // set iff diagnostics is empty
    DiagnosticList diagnostics;

    bool ok() const { return world.has_value(); }
};

// Compiles a game script. Total: every failure mode yields a diagnostic with
// a 1-based line number; a script either produces a world satisfying all
// structural invariants or a non-empty diagnostic list.
ParseResult parse_script(std::string_view source);

ParseResult parse_script_file(const std::string& path);

}  // namespace scruple
