#pragma once

// Umbrella header: exact risk functionals for confidence intervals centred
// on the ideal bootstrap smoothed estimator, and the decision-theoretic
// lower-bound machinery (unfavorable priors, g~, LB(u), u**, gain/loss).

#include "cibound/bound.hpp"
#include "cibound/config.hpp"
#include "cibound/manifest.hpp"
#include "cibound/mc.hpp"
#include "cibound/nelder_mead.hpp"
#include "cibound/normal.hpp"
#include "cibound/optimizer.hpp"
#include "cibound/prior.hpp"
#include "cibound/quadrature.hpp"
#include "cibound/risk.hpp"
#include "cibound/rng.hpp"
#include "cibound/roots.hpp"
#include "cibound/smoothing.hpp"
#include "cibound/version.hpp"
#include "cibound/width.hpp"
