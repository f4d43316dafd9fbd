#pragma once

#include <string>
#include <vector>

namespace srsim {

enum class TransferKind { forget, full_transfer, partial_transfer };

// Layers are numbered 1..n_layers (1 = input layer). For partial transfer the
// layer set must be a nonempty strict subset; layers outside it are redrawn.
struct TransferStrategy {
    TransferKind kind = TransferKind::forget;
    std::vector<int> layers;

    void validate(int n_layers) const;
};

TransferKind transfer_kind_from_string(const std::string& s);
std::string to_string(TransferKind kind);

struct SingularityEvent {
    double time_s = 0.0;
    std::string description;
};

// Scheduled-event oracle standing in for a real anomaly detector: fires
// exactly at the steps matching the configured event times.
class SingularityDetector {
public:
    SingularityDetector() = default;
    SingularityDetector(std::vector<SingularityEvent> events, double step_s);

    bool detect(std::uint64_t step) const;

    const std::vector<SingularityEvent>& events() const { return events_; }

private:
    std::vector<SingularityEvent> events_;
    std::vector<std::uint64_t> event_steps_;
};

} // namespace srsim
