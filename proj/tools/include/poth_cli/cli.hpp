#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "poth/report.hpp"

namespace poth::cli {

enum class PlotKind { residuals, cumulative, scores };

const char* to_string(PlotKind k) noexcept;
PlotKind parse_plot_kind(std::string_view s);

/// Standalone 800x500 SVG of one report series. Identical reports render to
/// identical bytes. Throws ValidationError when the series is absent.
std::string render_svg(const HierarchyReport& report, PlotKind kind);

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;  // also usage and unsupported-source errors
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one invocation. `args` excludes the program name. Results go to
/// --output or `out`; diagnostics go to `err`, each error as a single line
/// "error:<category>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poth::cli
