#include "lora/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lora {

ModemParams::ModemParams(int sf_, double bw_, double fc_, int osr_)
    : sf(sf_), bw(bw_), fc(fc_), osr(osr_) {
    validate();
}

void ModemParams::validate() const {
    if (sf < 5 || sf > 12)
        throw std::invalid_argument("spreading factor must be in 5..12, got " + std::to_string(sf));
    if (!(bw > 0.0) || !std::isfinite(bw))
        throw std::invalid_argument("bandwidth must be positive");
    if (osr < 1)
        throw std::invalid_argument("oversampling ratio must be >= 1");
    if (!std::isfinite(fc))
        throw std::invalid_argument("carrier frequency must be finite");
}

void PreambleSpec::validate(const ModemParams& params) const {
    if (n_up < 2)
        throw std::invalid_argument("preamble needs at least two up-chirps");
    for (int w : sync_words)
        if (w < 0 || w >= params.n())
            throw std::domain_error("sync word out of range");
    if (!(n_down >= 2.0))
        throw std::invalid_argument("preamble needs at least two full down-chirps");
}

}  // namespace lora
