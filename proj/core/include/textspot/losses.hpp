#pragma once

#include <functional>
#include <span>
#include <vector>

#include "textspot/geometry.hpp"

namespace textspot {

/// Weighting factors of the training objective. Values for the lambda/eta
/// symbols are not standardized anywhere, so every one of them is
/// configuration; these are the documented defaults.
struct LossWeights {
    double cls = 2.0;          // classification term
    double coord = 5.0;        // control-point L1 term
    double giou = 2.0;         // box GIoU term
    double chr = 1.0;          // character cross-entropy term
    double adv = 0.005;        // adversarial weight (lambda) in the generator loss
    double pix = 0.01;         // pixel L1 weight (eta) in the generator loss
    double focal_alpha = 0.25;
    double focal_gamma = 2.0;

    void validate() const;
    LossWeights scaled(double c) const;
};

/// A scalar loss together with its gradient w.r.t. the operation's primary
/// input, flattened in the input's storage order.
struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;
};

/// Probabilities are clamped to [kProbEps, 1 - kProbEps] before any log.
constexpr double kProbEps = 1e-7;

/// Maximum decoded text length; positions beyond it are rejected.
constexpr int kMaxTextLength = 25;

/// Focal loss for a single binary prediction. Gradient w.r.t. p (1 entry).
/// y=1: -alpha (1-p)^gamma log p; y=0: -(1-alpha) p^gamma log(1-p).
LossValue focal_loss(double p, int y, double alpha, double gamma);

/// Matching cost of a positive detection: alpha (1-p)^gamma (-log p).
/// Zero for a fully confident positive.
double focal_class_cost(double p, double alpha, double gamma);

/// Mean absolute coordinate error over the 2N coordinates of two polygons
/// with identical point counts. Gradient w.r.t. pred, layout (x0,y0,x1,...).
LossValue l1_coord_loss(const Polygon& pred, const Polygon& gt);

/// 1 - GIoU(pred, gt), range [0, 2]. Gradient w.r.t. pred's (x0,y0,x1,y1).
LossValue giou_loss(const BBox& pred, const BBox& gt);

/// Character padding sentinel: one past the last real class index. Padded
/// positions carry no loss and no gradient.
inline int char_padding_index(int vocab_size) { return vocab_size; }

/// Mean cross entropy over non-padding positions. `logits[t]` holds the V
/// class scores of position t; `targets[t]` is a class index or the padding
/// sentinel V. Gradient w.r.t. all logits (positions * V entries).
LossValue char_ce_loss(const std::vector<std::vector<double>>& logits,
                       const std::vector<int>& targets);

/// Per-proposal components entering the encoder objective.
struct ProposalTerms {
    double cls = 0.0;
    double coord = 0.0;
    double giou = 0.0;
};

/// Per-query components entering the decoder objective.
struct QueryTerms {
    double cls = 0.0;
    double coord = 0.0;
    double chr = 0.0;
};

/// sum_i (w.cls * cls_i + w.coord * coord_i + w.giou * giou_i).
/// Gradient w.r.t. the flattened component list (cls0, coord0, giou0, ...).
LossValue encoder_loss(std::span<const ProposalTerms> terms, const LossWeights& w);

/// Same shape with the character term in place of GIoU.
LossValue decoder_loss(std::span<const QueryTerms> terms, const LossWeights& w);

/// Relativistic average discriminator/generator terms.
/// D(r, fakes) = sigmoid(C(r) - mean C(fake));
/// d = -mean log D(real, fakes) - mean log(1 - D(fake, reals)); g swaps roles.
/// Gradients are w.r.t. the concatenated logits (real..., fake...).
struct AdversarialTerms {
    LossValue d;
    LossValue g;
};

AdversarialTerms relativistic_adv_terms(std::span<const double> real_logits,
                                        std::span<const double> fake_logits);

/// Overall generator objective: l_per + w.adv * g_adv + w.pix * l1_pix.
double generator_loss(double l_per, double g_adv, double l1_pix, const LossWeights& w);

/// Differentiable scalar function handle: value and analytic gradient at x.
using GradFn = std::function<LossValue(std::span<const double>)>;

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
double finite_diff_grad_check(const GradFn& f, std::span<const double> x, double step = 1e-6);

}  // namespace textspot
