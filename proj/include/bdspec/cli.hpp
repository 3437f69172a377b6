#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdspec/tolerances.hpp"

namespace bdspec::cli {

inline constexpr const char* tool_version = "0.1.0";

struct RunConfig {
    std::string command;
    std::optional<double> b;
    double beta = 0.0;
    std::string q = "zero";  // zero | a number (constant q) | CSV path with r,q rows
    std::optional<double> lambda_min, lambda_max;
    int max_mode = -1;       // spectrum: highest angular mode, -1 picks it from the window
    std::string out = ".";
    Tolerances tol = default_tolerances();

    // asymptotics
    int count = 8;
    bool pseudo_modes = false;
    double plateau = 0.5;
    double support_end = 0.9;

    // pencil
    int truncation = 60;
    int sine_modes = 24;
    double outer_radius = 2.0;
    double local_expansion_below = 1e-4;
    bool check_truncation = false;
    bool complex_sweep = false;
    int sweep_points = 200;

    // recover
    std::string tail;  // CSV with a lambda column and optional paper_index / mode columns
    int n_tail = 8;    // forward tail length when no CSV is given
};

// Full command line including the program name. Exit codes: 0 ok, 2 config, 3 numerical.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// 17 significant digits
std::string fmt(double x);

}  // namespace bdspec::cli
