#pragma once

#include <string>
#include <vector>

namespace scruple {

struct Diagnostic {
    int line = 0;  // 1-based; 0 when the finding is not tied to a source line
    std::string message;
};

using DiagnosticList = std::vector<Diagnostic>;

std::string format_diagnostics(const DiagnosticList& diags);

}  // namespace scruple
