#ifndef LIVSIC_SYNTH_HPP
#define LIVSIC_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "livsic/cocycle.hpp"

namespace livsic {

struct SynthesizedCocycle {
    CocycleSpec cocycle;          // A = C(f.) C(.)^{-1}
    double transfer_bound = 1.0;  // B = sampled max(|C|, |C^{-1}|)
};

/// Manufactures an exact coboundary from a transfer spec, recording the
/// budget constant B used by growth-aware tolerances downstream.
template <class Base>
SynthesizedCocycle make_coboundary(const TransferSpec& transfer, const Base& base,
                                   const std::vector<typename Base::Point>& samples,
                                   Norm norm = Norm::Inf) {
    SynthesizedCocycle out;
    out.cocycle = CocycleSpec::coboundary_of(transfer);
    out.transfer_bound = generator_norm_bound(transfer, base, samples, norm);
    return out;
}

/// Left-multiplies the generator by exp(eta * G(x)) with a seeded random
/// generator G; eta = 0 returns the spec unchanged, so outputs are
/// byte-identical to the unperturbed run.
template <class Base>
CocycleSpec make_perturbed(const CocycleSpec& spec, const Base& base, double eta,
                           std::uint64_t seed) {
    if (eta == 0.0) return spec;
    CocycleSpec out = spec;
    out.perturb_eta = eta;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_matrix = [&]() {
        Matrix m(spec.dim, spec.dim);
        for (int i = 0; i < spec.dim; ++i)
            for (int j = 0; j < spec.dim; ++j) m(i, j) = unif(rng);
        return m;
    };
    if constexpr (std::is_same_v<Base, ToralAutomorphism>) {
        (void)base;
        out.perturb_terms.clear();
        TrigTerm t1{random_matrix(), {1.0, 0.0}, 0.0};
        TrigTerm t2{random_matrix(), {0.0, 1.0}, unif(rng) * M_PI};
        out.perturb_terms = {t1, t2};
    } else {
        out.perturb_table.clear();
        for (int s = 0; s < base.alphabet_size(); ++s)
            out.perturb_table[std::string(1, char('0' + s))] = random_matrix();
    }
    return out;
}

} // namespace livsic

#endif
