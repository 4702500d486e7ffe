#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace helmfosls {

using Real = double;
using Complex = std::complex<Real>;

using Vec2 = Eigen::Vector2d;
using Vec2c = Eigen::Vector2cd;
using VectorXr = Eigen::VectorXd;
using VectorXc = Eigen::VectorXcd;
using MatrixXr = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;
using SparseXr = Eigen::SparseMatrix<Real>;
using SparseXc = Eigen::SparseMatrix<Complex>;
using TripletR = Eigen::Triplet<Real>;
using TripletC = Eigen::Triplet<Complex>;

inline constexpr Complex I_UNIT{0.0, 1.0};

// failure conditions surfaced to callers; what() carries context
struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct InvalidGeometry : Error { using Error::Error; };
struct NonMatchingMesh : Error { using Error::Error; };
struct ClosureDiverged : Error { using Error::Error; };
struct LevelNotInHierarchy : Error { using Error::Error; };
struct MeshMismatch : Error { using Error::Error; };
struct NotHPD : Error { using Error::Error; };
struct DimCapExceeded : Error { using Error::Error; };
struct SingularPatch : Error { using Error::Error; };
struct QuadratureNonConvergent : Error { using Error::Error; };
struct NonNestedSpaces : Error { using Error::Error; };
struct MaxIterations : Error { using Error::Error; };
struct LucklessBreakdown : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace helmfosls
