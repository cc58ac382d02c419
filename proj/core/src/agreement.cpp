#include "toneforge/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "toneforge/errors.hpp"

namespace toneforge {

namespace {

// 1-based ranks, tied values sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
    return buf;
}

}  // namespace

int bin_verdict(const JudgeVerdict& verdict) {
    if (!verdict.valid()) throw PreconditionError("cannot bin an invalid verdict");
    if (!*verdict.is_rewrite) return 0;
    return static_cast<int>(std::floor(*verdict.mean_grade() + 0.5));
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw PreconditionError("spearman needs equally long inputs");
    if (x.size() < 2) return std::nullopt;
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    // Identical rankings give sxy == sxx == syy exactly, hence 1.0 exactly.
    if (sxy == sxx && sxx == syy) return 1.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

AgreementReport compute_agreement(const DatasetTable& table) {
    std::vector<double> human, llm;
    std::size_t exact = 0, conversation = 0;
    for (const ExampleRecord& r : table.records) {
        if (!r.human_score || !r.verdict || !r.verdict->valid()) continue;
        const int h = r.human_score->value;
        human.push_back(h);
        llm.push_back(*r.verdict->normalized());
        if (bin_verdict(*r.verdict) == h) ++exact;
        if ((h == 0) == !*r.verdict->is_rewrite) ++conversation;
    }
    if (human.size() < 2)
        throw AgreementError("agreement needs at least 2 records with both a verdict and a human score, found " +
                             std::to_string(human.size()));
    AgreementReport report;
    report.n = human.size();
    report.spearman_rho = spearman(human, llm);
    report.exact_match_rate = static_cast<double>(exact) / static_cast<double>(report.n);
    report.conversation_agreement = static_cast<double>(conversation) / static_cast<double>(report.n);
    return report;
}

std::string format_agreement(const AgreementReport& report) {
    std::string out = "pairs: " + std::to_string(report.n) + "\n";
    out += "spearman_rho: ";
    if (report.spearman_rho) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *report.spearman_rho);
        out += buf;
    } else {
        out += "undefined (zero variance)";
    }
    out += "\nexact_match_rate: " + percent(report.exact_match_rate) + "\n";
    out += "conversation_agreement: " + percent(report.conversation_agreement) + "\n";
    return out;
}

}  // namespace toneforge
