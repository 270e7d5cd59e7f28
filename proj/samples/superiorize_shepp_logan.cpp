// Reconstructs a small Shepp-Logan phantom with plain ART, TV-S and TV-PPS
// and prints iterations, final residual and RMS error for each.

#include <cstdio>

#include <suprox/suprox.hpp>

int main() {
    using namespace suprox;

    const Image phantom = shepp_logan(48, 48);
    const auto data = bench::make_experiment_data(phantom, {30, 0.0, 6.0, 71, -1.0, 1.0}, std::nullopt, Box{0.0, 1.1});

    SuperConfig base;
    base.beta0 = 10.0;
    base.gamma = 0.5;
    base.epsilon = 0.01;
    base.max_outer = 200;

    for (auto method : {bench::Method::Art, bench::Method::TvS, bench::Method::TvPps}) {
        const auto run = superiorize(data.system, Image(phantom.grid()), bench::method_config(method, base), &phantom);
        std::printf("%-7s iterations=%4d res=%.3e mse=%.4f termination=%s\n", bench::to_string(method),
                    run.iterations, run.final_res, run.final_mse.value_or(0.0), to_string(run.reason));
    }
}
