#pragma once

#include <chrono>
#include <string>

#include "json.hpp"

namespace intentclust::detail {

/// POSTs a JSON body and returns the parsed JSON reply. Connection errors,
/// HTTP 429 and 5xx become BackendUnavailable (retryable); other non-2xx
/// statuses and unparsable bodies become Error.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const std::string& api_key,
                         std::chrono::seconds timeout);

}  // namespace intentclust::detail
