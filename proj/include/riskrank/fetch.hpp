// Copyright (C) 2026 The riskrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskrank::feeds {

enum class FeedSource { kev, epss, cve };

const char* to_string(FeedSource source);
std::optional<FeedSource> parse_feed_source(std::string_view text);

struct FeedSnapshot {
    FeedSource source = FeedSource::kev;
    std::int64_t retrieved_at = 0;  // unix seconds, UTC
    std::string content_digest;     // sha256 hex of the payload bytes
    std::filesystem::path payload_path;
    bool stale = false;             // served from an expired cache after a failed download
    std::string warning;
};

struct FetchRequest {
    FeedSource source = FeedSource::kev;
    // http(s)://, file://, or plain filesystem paths. With several sources,
    // `combine` turns the downloaded payloads into the stored one.
    std::vector<std::string> urls;
    std::function<std::string(std::vector<std::string>)> combine;
    std::filesystem::path cache_dir;
    bool offline = false;
    std::chrono::seconds max_age{24 * 3600};
    std::optional<std::int64_t> now;  // clock override for tests
};

// Returns the cached payload when it is younger than max_age (or when
// offline), otherwise downloads it and commits payload + metadata
// atomically. Writers for one (source, cache_dir) are serialized by an
// advisory lock. Gzip payloads are inflated before they are stored.
FeedSnapshot fetch_snapshot(const FetchRequest& request);

// Reads the committed snapshot for a source and verifies its digest.
std::optional<FeedSnapshot> read_cached_snapshot(FeedSource source, const std::filesystem::path& cache_dir);

// Raw transfer with no caching. Throws Error(network) on failure.
std::string download(const std::string& url);

std::string gunzip_if_needed(std::string bytes);

}  // namespace riskrank::feeds
