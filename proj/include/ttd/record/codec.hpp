#pragma once

#include <functional>
#include <optional>

#include "ttd/host/host_update.hpp"
#include "ttd/host/world.hpp"
#include "ttd/record/binary_io.hpp"

namespace ttd::record {

// Maps a heap object id to the id written out (identity, or a traversal
// ordinal inside checkpoints).
using RefMapper = std::function<uint32_t(lang::ObjectId)>;

void encode_value(Writer& w, const lang::Value& v, const RefMapper& map);
// `object_count`, when set, bounds object references (dangling -> IntegrityError).
lang::Value decode_value(Reader& r, std::optional<size_t> object_count);

void encode_plain(Writer& w, const host::PlainValue& v);
host::PlainValue decode_plain(Reader& r);

void encode_descriptor(Writer& w, const host::EventDescriptor& d);
host::EventDescriptor decode_descriptor(Reader& r);

void encode_update(Writer& w, const host::HostUpdate& u);
host::HostUpdate decode_update(Reader& r);

void encode_world(Writer& w, const host::HostWorld& world, const RefMapper& map);
host::HostWorld decode_world(Reader& r, std::optional<size_t> object_count);

}  // namespace ttd::record
