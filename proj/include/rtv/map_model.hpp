#pragma once
// Self-maps of T^n of the form  f(x) = A x + P(x)  (mod 1), with A integer,
// |det A| >= 1, and P a Z^n-periodic perturbation built from trigonometric
// terms and radial bumps.  Any lift satisfies F(x + m) = F(x) + A m, so f is
// a degree-|det A| covering map whenever Df stays invertible.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rtv/geometry.hpp"

namespace rtv {

using Mat = Eigen::MatrixXd;
using MatI = Eigen::MatrixXi;
using VecI = Eigen::VectorXi;
using MatL = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// amp * sin(2*pi*<k,x> + phase) added to coordinate `coord`; k = 0 gives a
// constant offset amp*sin(phase).
struct TrigTerm {
  VecI k;
  double amp = 0.0;
  double phase = 0.0;
  int coord = 0;
};

// disp * (1 - s)^3 with s = |x - center|^2 / radius^2 (Euclidean, nearest
// periodic image), zero outside s < 1.  C^2 at the support boundary and
// analytic inside; radius < 1/2 keeps the support inside one frame.
struct BumpTerm {
  Vec center;
  double radius = 0.1;
  Vec disp;
};

struct MapSpec {
  std::string name;
  MatI A;
  std::vector<TrigTerm> trig;
  std::vector<BumpTerm> bumps;

  int dim() const { return static_cast<int>(A.rows()); }
  bool linear() const { return trig.empty() && bumps.empty(); }
};

// Throws std::invalid_argument naming the offending field.
void validate(const MapSpec& m);

// Exact integer determinant / adjugate (cofactor expansion; n is small).
long long det_int(const MatI& A);
MatL adjugate_int(const MatI& A);
long long degree(const MapSpec& m);  // |det A|

// --- evaluation -------------------------------------------------------------

Vec perturbation(const MapSpec& m, const Vec& x);  // periodic part only
Vec eval_lift(const MapSpec& m, const Vec& x);     // A x + P(x)
TorusPoint eval_torus(const MapSpec& m, const TorusPoint& p);
Mat jacobian(const MapSpec& m, const Vec& x);

double min_norm(const Mat& M);       // smallest singular value
double operator_norm(const Mat& M);  // largest singular value

// --- preimages --------------------------------------------------------------

// Representatives of Z^n / A Z^n, entries in [0, |det A|); exactly |det A|.
std::vector<VecI> residues(const MatI& A);

// Newton solve of F(x) = target in the lift, seeded at x.  True on
// convergence (step below tol within `iters` rounds).
bool newton_lift(const MapSpec& m, const Vec& target, Vec& x, double tol,
                 int iters = 50);

// All |det A| preimages of y, one Newton branch per residue class.  Throws
// std::runtime_error if a branch diverges or two branches collide (the
// perturbation is then too large for the linear seeds).
std::vector<TorusPoint> preimages(const MapSpec& m, const TorusPoint& y,
                                  double tol = 1e-12);

// --- distances between maps -------------------------------------------------

// Sampled sup-distances over a uniform grid with per_axis points per axis.
// Infinity when the linear parts differ (lift distance is then unbounded).
// c1 is max(c0, sup |Df - Dg|_op).
double c0_distance(const MapSpec& f, const MapSpec& g, int per_axis = 64);
double c1_distance(const MapSpec& f, const MapSpec& g, int per_axis = 64);

// --- global perturbation bounds ---------------------------------------------

double perturbation_c0_bound(const MapSpec& m);  // sup_x max_i |P_i(x)|
double perturbation_c1_bound(const MapSpec& m);  // sup_x |DP(x)|_op

// --- interval image ---------------------------------------------------------

// Closed lift box containing F(cell): the linear part mapped exactly plus
// each term's value range over the cell.  Bump ranges use per-axis circle
// distance intervals, so the inflation vanishes off the bump support.
Box enclosure(const MapSpec& m, const Box& cell);

// --- serialization ----------------------------------------------------------

std::string to_json_string(const MapSpec& m);
MapSpec map_from_json_string(const std::string& text);
void save_map(const MapSpec& m, const std::string& path);
MapSpec load_map(const std::string& path);

}  // namespace rtv
