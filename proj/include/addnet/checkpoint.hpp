#pragma once

#include <map>
#include <string>

#include "addnet/network.hpp"

namespace addnet {

// Versioned JSON checkpoint: format tag, version, loss kind, layer list with
// full-precision parameter arrays, and an echo of the training configuration.
// Numbers are written in shortest round-trip decimal form, so
// load(save(net)) reproduces every parameter bit for bit and save is
// idempotent byte for byte.

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const Network& net, const std::string& path,
                     const std::map<std::string, std::string>& config = {});

struct LoadedCheckpoint {
    Network net;
    std::map<std::string, std::string> config;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace addnet
