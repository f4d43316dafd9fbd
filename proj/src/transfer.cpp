#include "srsim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace srsim {

void TransferStrategy::validate(int n_layers) const {
    if (kind != TransferKind::partial_transfer) return;
    if (layers.empty())
        throw std::invalid_argument("transfer.layers: partial transfer needs a nonempty layer set");
    if (static_cast<int>(layers.size()) >= n_layers)
        throw std::invalid_argument("transfer.layers: partial transfer must keep a strict subset");
    for (int l : layers)
        if (l < 1 || l > n_layers)
            throw std::invalid_argument("transfer.layers: layer index out of range");
}

TransferKind transfer_kind_from_string(const std::string& s) {
    if (s == "forget") return TransferKind::forget;
    if (s == "full") return TransferKind::full_transfer;
    if (s == "partial") return TransferKind::partial_transfer;
    throw std::invalid_argument("transfer.strategy: expected forget|full|partial, got '" + s + "'");
}

std::string to_string(TransferKind kind) {
    switch (kind) {
        case TransferKind::forget: return "forget";
        case TransferKind::full_transfer: return "full";
        case TransferKind::partial_transfer: return "partial";
    }
    return "?";
}

SingularityDetector::SingularityDetector(std::vector<SingularityEvent> events, double step_s)
    : events_(std::move(events)) {
    if (step_s <= 0.0) throw std::invalid_argument("detector: step length must be > 0");
    double prev = -1.0;
    for (const auto& ev : events_) {
        if (ev.time_s <= prev)
            throw std::invalid_argument("detector: event times must be strictly increasing");
        prev = ev.time_s;
        event_steps_.push_back(static_cast<std::uint64_t>(std::llround(ev.time_s / step_s)));
    }
}

bool SingularityDetector::detect(std::uint64_t step) const {
    return std::binary_search(event_steps_.begin(), event_steps_.end(), step);
}

} // namespace srsim
