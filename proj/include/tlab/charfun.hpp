#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlab/cogen.hpp"
#include "tlab/kernels.hpp"
#include "tlab/opcore.hpp"
#include "tlab/report.hpp"

namespace tlab {

struct DefectData {
    Mat D_W;
    Mat D_Wstar;
    SubspaceBasis basis_DW;
    SubspaceBasis basis_DWstar;
    Mat W;  // dense form of the operator the defects belong to
    // truncated shifts use the defects of the untruncated shift; the spurious
    // boundary defect of the finite matrix is dropped and recorded here
    bool artifact_suppressed = false;
    std::string rule = "dense";
};

DefectData defect(const OperatorRep& W);

// coordinates: basis_DW -> basis_DWstar
Mat theta(const DefectData& dd, cplx lambda);
Mat theta(const OperatorRep& W, cplx lambda);

struct CharFunSamples {
    GridDomain grid = GridDomain::circle(1);
    Index fiber = 0;  // dim D_W
    std::vector<Mat> theta;
    std::vector<Mat> delta;
    std::vector<double> idempotent_defect;  // |delta^2 - delta| per point
};

CharFunSamples delta_samples(const OperatorRep& W, Index N, Exec exec = Exec::parallel);
CharFunSamples delta_samples(const DefectData& dd, Index N, Exec exec = Exec::parallel);
CsvTable charfun_curve(const CharFunSamples& s);

struct HalfPlaneModel {
    GridDomain grid = GridDomain::line(1, 1.0, 0.0);
    std::vector<Mat> upsilon;  // (I - Xi^H Xi)^{1/2}, Xi(x) = Theta((x-i)/(x+i))
    RangeFunction range;
    OperatorRep evolution(double t) const;  // multiplication by exp(itx)
};

struct FunctionalModel {
    RangeFunction range;
    OperatorRep model_shift = OperatorRep::dense(Mat(0, 0));
    Index model_dim = 0;
    CClass c_class = CClass::inconclusive;
    bool exact_cyclic = false;
    double invariance_defect = 0.0;  // model shift leaving the model space
    double unitarity_defect = 0.0;
    std::optional<HalfPlaneModel> halfplane;
};

FunctionalModel functional_model_circle(const OperatorRep& W, Index N,
                                        std::optional<GridDomain> halfplane_grid = std::nullopt,
                                        Index n_max = 0);

struct HalfplaneTransform {
    GridFunction f;
    double tail_bound = 0.0;  // upper bound on the squared norm outside [-L, L]
    double norm_u = 0.0;      // dw/2pi weight
    double norm_f = 0.0;      // dx/pi weight
};

// f(x) = u((x-i)/(x+i)) / (x+i) on a symmetric line grid
HalfplaneTransform halfplane_transform(const GridFunction& u, const GridDomain& line);
HalfplaneTransform halfplane_transform(const std::function<cplx(cplx)>& u, double sup_u, double norm_u,
                                       const GridDomain& line);

struct IsometricDilation {
    Index d = 0;      // dim H
    Index r = 0;      // dim D_W
    Index steps = 0;  // copies of D_W
    OperatorRep U_plus = OperatorRep::dense(Mat(0, 0));
    SubspaceBasis embed_H;
    Mat W;
};

IsometricDilation schaffer_dilation(const OperatorRep& W, Index N_steps);
double compression_defect(const IsometricDilation& dil, Index n);
// |U^H U - I| outside the final block, and on it
std::pair<double, double> isometry_defect(const IsometricDilation& dil);

struct ResidualPart {
    SubspaceBasis basis;  // in dilation coordinates
    Mat R;                // compression of U_plus to the residual space, basis coordinates
    Index n_probe = 0;
};

ResidualPart residual_part(const IsometricDilation& dil, Index n_probe);

struct QuasiAffinity {
    Mat X;  // residual coordinates -> H
    double intertwining_residual = 0.0;
    Index probes_used = 0;
    double smallest_singular_value = 0.0;
    Index rank = 0;
    bool degenerate = false;
};

QuasiAffinity quasi_affinity_X(const IsometricDilation& dil, const ResidualPart& res, Index probe_margin = 8);

// Interior comparison of the residual part with the functional model:
// both should be isometric shifts of the same multiplicity away from the window edge.
struct ResidualModelMatch {
    double interior_isometry_defect = 0.0;
    Index residual_multiplicity = 0;
    Index model_multiplicity = 0;
};
ResidualModelMatch compare_residual_to_model(const IsometricDilation& dil, const ResidualPart& res,
                                             const FunctionalModel& model, Index probe_margin = 8);

}  // namespace tlab
