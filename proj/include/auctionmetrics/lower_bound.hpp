#pragma once

#include <cstddef>
#include <utility>

#include "auctionmetrics/auction_model.hpp"

namespace auctionmetrics {

/// Two first-price instances that agree off the event {Y <= eps}.
///
/// Every bidder i > 1 has density lambda + (1 - lambda) Unif[3/4, 1] in both.
/// Bidder 1 puts the (1 - lambda) mass on [0, eps/4] in the first instance and
/// on [3 eps/4, eps] in the second. Requires eps, lambda in (0, 1/2), k >= 2.
std::pair<AuctionModel, AuctionModel> lower_bound_fixture(std::size_t k, double eps, double lambda);

/// Pr(Y <= eps) under the first instance: F_1(eps) (lambda eps)^{k-1}.
double lower_bound_event_probability(std::size_t k, double eps, double lambda);

}  // namespace auctionmetrics
