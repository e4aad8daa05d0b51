#pragma once

#include "quadtune/neural.hpp"

#include <span>
#include <string>
#include <vector>

// Exported-policy container: a self-describing snapshot of the actor that can
// be reloaded and evaluated without the training stack. Two on-disk forms
// share one schema: a JSON text form (*.json) and a compact binary form
// (magic "QTPF"). reconstruct_action evaluates the stored matrices directly
// with the same scalar operation order as DenseNet's single-sample forward,
// so a reconstructed policy reproduces the live actor bit for bit.

namespace quadtune {

struct PolicyLayer {
    int rows = 0; // output dimension
    int cols = 0; // input dimension
    std::vector<double> weights; // row-major [rows][cols]
    std::vector<double> biases;  // [rows]
    std::string activation;      // "tanh" | "linear" | "clipped_relu"
};

struct PolicyFile {
    int version = 1;
    int obs_dim = 0;
    int act_dim = 0;
    double bound_hi = 1.0; // upper action bound (N)
    double bound_lo = -1.0; // lower action bound (Q)
    std::vector<PolicyLayer> layers;

    void validate() const; // DimensionMismatch / UnsupportedActivation
};

PolicyFile export_policy(const DenseNet& actor, double bound_hi, double bound_lo);

// Rebuild a DenseNet from the stored matrices (for harness evaluation).
DenseNet policy_to_net(const PolicyFile& pf);

// Path ending in ".json" selects the text form, anything else the binary one.
void save_policy(const PolicyFile& pf, const std::string& path);
PolicyFile load_policy(const std::string& path); // sniffs the binary magic

// Deployment-style inference from the stored matrices alone.
std::vector<double> reconstruct_action(const PolicyFile& pf,
                                       std::span<const double> obs);

} // namespace quadtune
