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

#include "riskrank/fetch.hpp"

#include <curl/curl.h>
#include <zlib.h>

#include <memory>
#include <mutex>

#include <json.hpp>

#include "riskrank/common.hpp"
#include "riskrank/io.hpp"

namespace riskrank::feeds {

namespace fs = std::filesystem;

const char* to_string(FeedSource source) {
    switch (source) {
    case FeedSource::kev: return "kev";
    case FeedSource::epss: return "epss";
    case FeedSource::cve: return "cve";
    }
    return "unknown";
}

std::optional<FeedSource> parse_feed_source(std::string_view text) {
    if (text == "kev") return FeedSource::kev;
    if (text == "epss") return FeedSource::epss;
    if (text == "cve") return FeedSource::cve;
    return std::nullopt;
}

namespace {

std::size_t append_body(char* data, std::size_t size, std::size_t count, void* user) {
    static_cast<std::string*>(user)->append(data, size * count);
    return size * count;
}

std::string http_get(const std::string& url) {
    static std::once_flag init;
    std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) throw Error(ErrorCode::network, "curl_easy_init failed");
    std::string body;
    char errbuf[CURL_ERROR_SIZE] = {0};
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 30L);
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, 600L);
    curl_easy_setopt(curl.get(), CURLOPT_USERAGENT, "riskrank/1.0");
    curl_easy_setopt(curl.get(), CURLOPT_ACCEPT_ENCODING, "");
    curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, errbuf);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, append_body);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &body);
    CURLcode rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) {
        throw Error(ErrorCode::network, "download of " + url + " failed: " +
                                            (errbuf[0] ? std::string(errbuf) : curl_easy_strerror(rc)));
    }
    return body;
}

fs::path source_dir(FeedSource source, const fs::path& cache_dir) { return cache_dir / to_string(source); }

std::int64_t unix_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::string download(const std::string& url) {
    if (url.starts_with("http://") || url.starts_with("https://")) return http_get(url);
    fs::path path = url.starts_with("file://") ? fs::path(url.substr(7)) : fs::path(url);
    try {
        return io::read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::network, std::string("cannot read source: ") + e.what());
    }
}

std::string gunzip_if_needed(std::string bytes) {
    if (bytes.size() < 2 || static_cast<unsigned char>(bytes[0]) != 0x1f ||
        static_cast<unsigned char>(bytes[1]) != 0x8b) {
        return bytes;
    }
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw Error(ErrorCode::format, "inflateInit2 failed");
    std::string out;
    char buf[1 << 16];
    zs.next_in = reinterpret_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw Error(ErrorCode::format, "corrupt gzip payload");
        }
        out.append(buf, sizeof buf - zs.avail_out);
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw Error(ErrorCode::format, "truncated gzip payload");
        }
    }
    inflateEnd(&zs);
    return out;
}

std::optional<FeedSnapshot> read_cached_snapshot(FeedSource source, const fs::path& cache_dir) {
    const auto dir = source_dir(source, cache_dir);
    const auto meta_path = dir / "meta.json";
    if (!fs::exists(meta_path)) return std::nullopt;
    nlohmann::json meta = nlohmann::json::parse(io::read_file(meta_path), nullptr, false);
    if (meta.is_discarded() || !meta.contains("content_digest") || !meta.contains("payload")) {
        throw Error(ErrorCode::cache_corrupt, "unreadable cache metadata " + meta_path.string());
    }
    FeedSnapshot snap;
    snap.source = source;
    snap.retrieved_at = meta.value("retrieved_at", std::int64_t{0});
    snap.content_digest = meta.at("content_digest").get<std::string>();
    snap.payload_path = dir / meta.at("payload").get<std::string>();
    if (!fs::exists(snap.payload_path)) {
        throw Error(ErrorCode::cache_corrupt, "cached payload missing: " + snap.payload_path.string());
    }
    if (io::sha256_hex(io::read_file(snap.payload_path)) != snap.content_digest) {
        throw Error(ErrorCode::cache_corrupt, "digest mismatch on cached " + snap.payload_path.string());
    }
    return snap;
}

FeedSnapshot fetch_snapshot(const FetchRequest& req) {
    const auto dir = source_dir(req.source, req.cache_dir);
    fs::create_directories(dir);
    io::FileLock lock(dir / ".lock");

    const std::int64_t now = req.now.value_or(unix_now());
    const fs::path meta_path = dir / "meta.json";
    const bool have_cache = fs::exists(meta_path);

    if (req.offline) {
        if (!have_cache) {
            throw Error(ErrorCode::cache_miss, std::string("offline and no cached ") + to_string(req.source) + " snapshot in " +
                                                   req.cache_dir.string());
        }
        return *read_cached_snapshot(req.source, req.cache_dir);
    }

    std::optional<std::int64_t> cached_at;
    if (have_cache) {
        auto meta = nlohmann::json::parse(io::read_file(meta_path), nullptr, false);
        // A snapshot of other sources is never fresh, whatever its age.
        if (!meta.is_discarded() && meta.value("urls", std::vector<std::string>{}) == req.urls) {
            cached_at = meta.value("retrieved_at", std::int64_t{0});
        }
        if (cached_at && now - *cached_at < req.max_age.count()) return *read_cached_snapshot(req.source, req.cache_dir);
    }

    if (req.urls.empty()) throw Error(ErrorCode::usage, std::string("no URL configured for ") + to_string(req.source));
    std::string payload;
    try {
        if (req.urls.size() == 1 && !req.combine) {
            payload = gunzip_if_needed(download(req.urls.front()));
        } else {
            if (!req.combine) throw Error(ErrorCode::configuration, "several sources need a combine step");
            std::vector<std::string> parts;
            for (const auto& url : req.urls) parts.push_back(gunzip_if_needed(download(url)));
            payload = req.combine(std::move(parts));
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::network || !have_cache) throw;
        auto snap = *read_cached_snapshot(req.source, req.cache_dir);
        snap.stale = true;
        snap.warning = std::string(e.what()) + "; using stale cached " + to_string(req.source) + " snapshot";
        return snap;
    }

    FeedSnapshot snap;
    snap.source = req.source;
    snap.retrieved_at = now;
    snap.content_digest = io::sha256_hex(payload);
    const std::string payload_name = "payload-" + snap.content_digest;
    snap.payload_path = dir / payload_name;

    std::optional<fs::path> previous;
    if (have_cache) {
        auto meta = nlohmann::json::parse(io::read_file(meta_path), nullptr, false);
        if (!meta.is_discarded() && meta.contains("payload")) previous = dir / meta.at("payload").get<std::string>();
    }

    io::write_file_atomic(snap.payload_path, payload);
    nlohmann::ordered_json meta;
    meta["source"] = to_string(req.source);
    meta["urls"] = req.urls;
    meta["retrieved_at"] = snap.retrieved_at;
    meta["content_digest"] = snap.content_digest;
    meta["payload"] = payload_name;
    meta["size"] = payload.size();
    io::write_file_atomic(meta_path, meta.dump(2) + "\n");
    if (previous && *previous != snap.payload_path) fs::remove(*previous);
    return snap;
}

}  // namespace riskrank::feeds
