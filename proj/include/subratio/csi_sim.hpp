#pragma once

#include <memory>

#include "subratio/scenario.hpp"
#include "subratio/trace.hpp"

namespace subratio {

/// H_S(m): aggregate of all static paths.
cplx static_component(const ChannelScenario& scenario, const SubcarrierGrid& grid, std::size_t m);
/// H_D(m, k): chest-reflected component.
cplx dynamic_component(const ChannelScenario& scenario, const SubcarrierGrid& grid, std::size_t m,
                       std::size_t k);

/// Noise-free CSI: H(m,k) = sum_p A_S,p(m) e^{-j2pi d_S,p/lambda_m} + A_D(m) e^{-j2pi d_D(k)/lambda_m}.
CsiTrace generate_ideal_csi(const ChannelScenario& scenario,
                            std::shared_ptr<const SubcarrierGrid> grid);

/**
 * Corrupt an ideal trace with the commodity-receiver error model:
 *   H~(m,k) = A_n(m,k) exp(-j[n(m)(eta_b(k) + eta_o) + phi(k)]) H(m,k) + eps(m,k)
 * plus optional motion artifacts. Deterministic in (ideal, cfg).
 */
CsiTrace apply_impairments(const CsiTrace& ideal, const ImpairmentConfig& cfg);

/// Fresnel phase angle(H_S(m)) - angle(H_D(m,k)), unwrapped over k.
/// Throws NumericError when H_S or H_D vanishes.
RealSeries fresnel_phase(const ChannelScenario& scenario, const SubcarrierGrid& grid, std::size_t m);

/// Convenience: build, generate and impair in one call.
CsiTrace simulate(const ScenarioConfig& scenario, const ImpairmentConfig& impairments,
                  std::shared_ptr<const SubcarrierGrid> grid);

}  // namespace subratio
