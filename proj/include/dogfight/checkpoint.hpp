#pragma once

// Binary checkpoint file:
//
//   "DGFT" | u32 version | u64 payload length | payload | u32 CRC-32 of payload
//
// All integers and f64 values little-endian. The payload holds the iteration,
// seed, config hash, content hash and the actor then critic tensors, each as
// rank, dims and row-major values.

#include <string>
#include <vector>

#include "dogfight/selfplay.hpp"

namespace dogfight {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public Error {
public:
    enum class Kind { Io, BadMagic, VersionMismatch, Truncated, CrcMismatch, Malformed };
    CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

std::vector<std::uint8_t> encode_checkpoint(const AgentCheckpoint& ckpt);
/// Throws CheckpointError; also rejects a content hash that does not match the tensors.
AgentCheckpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::string& path, const AgentCheckpoint& ckpt);
AgentCheckpoint load_checkpoint(const std::string& path);

}  // namespace dogfight
