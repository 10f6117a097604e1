/// @file cli.hpp
/// @brief Command-line driver entry point, callable in-process for tests.
///
/// Subcommands: `simulate <config> [out_dir]`, `steady <config> [out_dir]`,
/// `analyze <diagnostics.csv> [--column NAME] [--t-begin T --t-end T]
/// [--out FILE]`. Exit codes: 0 success, 2 configuration or usage error,
/// 3 solver failure, 4 I/O failure.

#pragma once

namespace ehd {

int cli_main(int argc, const char* const* argv);

} // namespace ehd
