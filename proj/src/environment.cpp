#include <stdexcept>

#include "tagirl/envs.hpp"

namespace tagirl {

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              const ChainMDPSpec& chain) {
    if (name == "cartpole") return std::make_unique<CartPole>();
    if (name == "chain") return std::make_unique<ChainMDP>(chain);
    throw std::invalid_argument("unknown environment '" + name + "'");
}

}  // namespace tagirl
