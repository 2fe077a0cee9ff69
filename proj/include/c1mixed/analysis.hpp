#pragma once

#include "c1mixed/functions.hpp"
#include "c1mixed/mesh.hpp"
#include "c1mixed/space.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace c1mixed {

/// Uniform samples per reference element: (n+1)^2 on quads and
/// (n+1)(n+2)/2 on triangles. n = 50 gives 2601 and 1326.
std::vector<Point> linf_samples(ElementKind kind, int n = 50);

/// max |f - f_h| over the uniform samples of every element.
double error_linf(const SplineFunction& fh, const Oracle& f, const MixedMesh& mesh, int n = 50);

/// max |f| over the same samples.
double norm_linf(const Oracle& f, const MixedMesh& mesh, int n = 50);

/// L2 norm (order 0) or H1/H2 seminorm (order 1, 2) of f - f_h.
double error_sobolev(const SplineFunction& fh, const Oracle& f, const MixedMesh& mesh, int order, int points = 0);

/// Same norm of f alone.
double norm_sobolev(const Oracle& f, const MixedMesh& mesh, int order, int points = 0);

enum class Experiment { Interpolation, L2Fit, Biharmonic };

const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

enum Norm { Linf = 0, L2 = 1, H1 = 2, H2 = 3 };
inline constexpr std::array<const char*, 4> norm_names{"linf", "l2", "h1", "h2"};

/// Errors below this (relative to max(1, |f|)) are floor-limited.
inline constexpr double error_floor = 1e-13;

struct LevelResult {
    int level = 0;
    double h = 0;
    long ndof = 0;
    std::array<std::optional<double>, 4> error;          ///< reported (relative for biharmonic)
    std::array<std::optional<double>, 4> absolute_error; ///< always absolute
    std::array<std::optional<double>, 4> rate;           ///< empty at level 0 or when not computable
    std::array<bool, 4> exact{};                          ///< error below the floor on this level
};

struct ErrorReport {
    Experiment experiment = Experiment::Interpolation;
    int degree = 0;
    bool relative = false;
    std::vector<LevelResult> levels;
};

struct StudyConfig {
    Experiment experiment = Experiment::Interpolation;
    int degree = 5;
    int levels = 4;
    std::string function = "trig";
    std::array<bool, 4> norms{true, true, true, true};
};

/// log2(previous / current).
double decay_exponent(double previous, double current);

/// Runs the experiment on mesh, refine(mesh), ... for config.levels levels.
ErrorReport convergence_study(const StudyConfig& config, const MixedMesh& mesh);

/// CSV with header level,h,ndof,err_linf,...,gamma_h2; gamma cells are a
/// number, "exact" for floor-limited pairs, or empty.
std::string to_csv(const ErrorReport& report);

/// Parses the CSV written by to_csv (errors and rates only).
std::vector<LevelResult> parse_csv(const std::string& text);

/// Rate requirements used by --assert-rates. Returns one message per
/// violated requirement.
std::vector<std::string> check_rates(const ErrorReport& report);

} // namespace c1mixed
