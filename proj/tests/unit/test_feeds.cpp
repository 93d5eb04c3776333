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

#include <doctest.h>

#include "riskrank/feeds.hpp"
#include "testutil.hpp"

using namespace riskrank;
using namespace riskrank::feeds;
using riskrank::testing::fixture_text;

namespace {

template <typename F>
Error capture(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an Error");
    return Error(ErrorCode::usage, "unreachable");
}

}  // namespace

TEST_SUITE("feeds") {
    TEST_CASE("KEV catalog keeps element order") {
        const auto kev = parse_kev_catalog(R"({"title":"t","vulnerabilities":[
            {"cveID":"CVE-2021-44228","dateAdded":"2021-12-10","vendorProject":"Apache","product":"Log4j2",
             "vulnerabilityName":"Log4Shell"},
            {"cveID":"CVE-2014-0160","dateAdded":"2022-05-04"}]})");
        REQUIRE(kev.size() == 2);
        CHECK(kev[0].cve_id == "CVE-2021-44228");
        CHECK(to_string(kev[0].date_added) == "2021-12-10");
        CHECK(kev[0].vendor_project == "Apache");
        CHECK(kev[1].cve_id == "CVE-2014-0160");
        CHECK(to_string(kev[1].date_added) == "2022-05-04");
    }

    TEST_CASE("KEV empty catalog") {
        CHECK(parse_kev_catalog(R"({"vulnerabilities":[]})").empty());
        CHECK(parse_kev_catalog(fixture_text("feeds/kev_empty.json")).empty());
    }

    TEST_CASE("KEV duplicates keep the earliest date") {
        const auto late_first = parse_kev_catalog(R"({"vulnerabilities":[
            {"cveID":"CVE-2020-0001","dateAdded":"2023-01-01"},
            {"cveID":"CVE-2020-0002","dateAdded":"2022-06-01"},
            {"cveID":"CVE-2020-0001","dateAdded":"2022-01-01"}]})");
        REQUIRE(late_first.size() == 2);
        CHECK(late_first[0].cve_id == "CVE-2020-0001");
        CHECK(to_string(late_first[0].date_added) == "2022-01-01");
        const auto early_first = parse_kev_catalog(R"({"vulnerabilities":[
            {"cveID":"CVE-2020-0001","dateAdded":"2022-01-01"},
            {"cveID":"CVE-2020-0001","dateAdded":"2023-01-01"}]})");
        REQUIRE(early_first.size() == 1);
        CHECK(to_string(early_first[0].date_added) == "2022-01-01");
    }

    TEST_CASE("KEV JSON-lines form") {
        const auto kev = parse_kev_catalog(
            "{\"cveID\":\"CVE-2021-44228\",\"dateAdded\":\"2021-12-10\"}\n"
            "\n"
            "{\"cveID\":\"CVE-2014-0160\",\"dateAdded\":\"2022-05-04\"}\n");
        REQUIRE(kev.size() == 2);
        CHECK(kev[1].cve_id == "CVE-2014-0160");
        // Serialized entries parse back to the same values.
        CHECK(parse_kev_catalog(to_jsonl(kev)) == kev);
    }

    TEST_CASE("KEV malformed document names the byte offset") {
        const std::string doc = R"({"vulnerabilities":[{"cveID":"CVE-2021-44228",,]})";
        const auto e = capture([&] { parse_kev_catalog(doc); });
        CHECK(e.code() == ErrorCode::parse);
        REQUIRE(e.position());
        CHECK(*e.position() == doc.find(",,") + 1);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }

    TEST_CASE("KEV element missing a field reports its index") {
        const auto e = capture([] {
            parse_kev_catalog(R"({"vulnerabilities":[{"cveID":"CVE-2021-44228","dateAdded":"2021-12-10"},
                                 {"cveID":"CVE-2014-0160"}]})");
        });
        CHECK(e.code() == ErrorCode::record);
        CHECK(e.position() == 1u);
        CHECK(capture([] { parse_kev_catalog(R"({"vulnerabilities":[{"dateAdded":"2021-12-10"}]})"); }).position() ==
              0u);
        CHECK(capture([] { parse_kev_catalog(R"({"catalog":[]})"); }).code() == ErrorCode::format);
        CHECK(capture([] { parse_kev_catalog(R"({"vulnerabilities":{}})"); }).code() == ErrorCode::format);
    }

    TEST_CASE("KEV bundled fixture") {
        const auto kev = parse_kev_catalog(fixture_text("feeds/kev.json"));
        CHECK(kev.size() == 12);  // 13 listings, one duplicate
    }

    TEST_CASE("EPSS snapshot") {
        const auto snap =
            parse_epss_snapshot("#model_version:v2023.03.01,score_date:2025-01-02\ncve,epss,percentile\n"
                                "CVE-2021-44228,0.97565,0.99995\n");
        CHECK(snap.model_version == "v2023.03.01");
        CHECK(to_string(snap.score_date) == "2025-01-02");
        REQUIRE(snap.entries.size() == 1);
        CHECK(snap.entries[0].cve_id == "CVE-2021-44228");
        CHECK(snap.entries[0].epss == 0.97565);
        CHECK(snap.entries[0].percentile == 0.99995);
    }

    TEST_CASE("EPSS header-only and CRLF files") {
        CHECK(parse_epss_snapshot("#model_version:v1,score_date:2025-01-02T00:00:00+0000\ncve,epss,percentile\n")
                  .entries.empty());
        const auto crlf = parse_epss_snapshot(
            "#model_version:v1,score_date:2025-01-02\r\ncve,epss,percentile\r\nCVE-2020-0001,0.5,0.9\r\n");
        REQUIRE(crlf.entries.size() == 1);
        CHECK(crlf.entries[0].percentile == 0.9);
    }

    TEST_CASE("EPSS errors") {
        const std::string head = "#model_version:v1,score_date:2025-01-02\ncve,epss,percentile\n";
        auto range = capture([&] { parse_epss_snapshot(head + "CVE-2020-0001,0.5,0.5\nCVE-2020-0002,1.5,0.5\n"); });
        CHECK(range.code() == ErrorCode::range);
        CHECK(range.position() == 4u);
        CHECK(std::string(range.what()).find("line 4") != std::string::npos);
        CHECK(capture([&] { parse_epss_snapshot(head + "CVE-2020-0001,-0.1,0.5\n"); }).code() == ErrorCode::range);
        auto nonnum = capture([&] { parse_epss_snapshot(head + "CVE-2020-0001,abc,0.5\n"); });
        CHECK(nonnum.code() == ErrorCode::record);
        CHECK(nonnum.position() == 3u);
        CHECK(capture([] { parse_epss_snapshot("cve,epss,percentile\nCVE-2020-0001,0.5,0.5\n"); }).code() ==
              ErrorCode::format);
        CHECK(capture([] { parse_epss_snapshot("#model_version:v1\ncve,epss,percentile\n"); }).code() ==
              ErrorCode::format);
        CHECK(capture([] { parse_epss_snapshot("#model_version:v1,score_date:2025-01-02\ncve,score\n"); }).code() ==
              ErrorCode::format);
        CHECK(capture([&] { parse_epss_snapshot(head + "CVE-2020-0001,0.5,0.5\nCVE-2020-0001,0.4,0.5\n"); })
                  .code() == ErrorCode::record);
        CHECK(capture([&] { parse_epss_snapshot(head + "CVE-2020-0001,0.5\n"); }).code() == ErrorCode::record);
    }

    TEST_CASE("EPSS range fuzz: every in-range value parses, every out-of-range value is rejected") {
        const std::string head = "#model_version:v1,score_date:2025-01-02\ncve,epss,percentile\n";
        std::uint64_t x = 12345;
        for (int i = 0; i < 500; ++i) {
            x = x * 6364136223846793005ULL + 1442695040888963407ULL;
            const double v = static_cast<double>(x >> 11) * 0x1.0p-53 * 3.0 - 1.0;  // [-1, 2)
            const std::string row = "CVE-2020-0001," + format_double(v) + ",0.5\n";
            if (v >= 0.0 && v <= 1.0) {
                CHECK(parse_epss_snapshot(head + row).entries.at(0).epss == v);
            } else {
                CHECK(capture([&] { parse_epss_snapshot(head + row); }).code() == ErrorCode::range);
            }
        }
    }

    TEST_CASE("EPSS bundled fixture") {
        const auto snap = parse_epss_snapshot(fixture_text("feeds/epss.csv"));
        CHECK(snap.entries.size() == 2010);
        CHECK(to_string(snap.score_date) == "2025-06-01");
    }

    TEST_CASE("normalized CVE rows") {
        const auto rows = parse_cve_records(
            R"({"cve_id":"CVE-2020-0001","published":"2020-01-14","severity_band":"high","cwe_ids":["CWE-787"]})"
            "\n"
            R"({"cve_id":"CVE-2020-0002","published":"2020-01-14","cwe_ids":["NVD-CWE-noinfo"],"base_score":9.8})"
            "\n");
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].severity_band == Band::high);
        CHECK(rows[0].cwe_ids == std::vector<std::string>{"CWE-787"});
        CHECK_FALSE(rows[0].base_score);
        CHECK(rows[1].cwe_ids.empty());
        CHECK(rows[1].base_score == 9.8);
        CHECK_FALSE(rows[1].severity_band);
    }

    TEST_CASE("CVE rows round-trip through JSON lines") {
        const auto rows = parse_cve_records(fixture_text("feeds/cves.jsonl"));
        CHECK(rows.size() == 2040);
        CHECK(parse_cve_records(to_jsonl(rows)) == rows);
    }

    TEST_CASE("NVD 2.0 feed") {
        const auto rows = parse_cve_records(fixture_text("nvd/nvd2_sample.json"));
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].cve_id == "CVE-2021-44228");
        CHECK(to_string(rows[0].published) == "2021-12-10");
        CHECK(rows[0].base_score == 10.0);  // Primary entry wins over the secondary 9.0
        CHECK(rows[0].severity_band == Band::critical);
        CHECK(rows[0].cwe_ids == std::vector<std::string>{"CWE-917", "CWE-502", "CWE-20"});
        CHECK(rows[0].description.find("JNDI") != std::string::npos);
        CHECK(rows[1].severity_band == Band::high);  // v3.0 metrics
        CHECK(rows[1].base_score == 7.5);
        CHECK(rows[2].base_score == 7.8);  // only v2 present
        CHECK(rows[2].severity_band == Band::high);
        CHECK(rows[2].cwe_ids.empty());
        CHECK_FALSE(rows[3].base_score);
        CHECK_FALSE(rows[3].severity_band);
        CHECK(rows[3].cwe_ids.empty());
    }

    TEST_CASE("NVD 1.1 feed") {
        const auto rows = parse_cve_records(fixture_text("nvd/nvd11_sample.json"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].cve_id == "CVE-2017-0144");
        CHECK(rows[0].base_score == 8.1);
        CHECK(rows[0].severity_band == Band::high);
        CHECK(rows[0].cwe_ids == std::vector<std::string>{"CWE-20"});
        CHECK(rows[1].base_score == 5.0);
        CHECK(rows[1].severity_band == Band::medium);
        CHECK(rows[1].cwe_ids.empty());
    }

    TEST_CASE("CVE errors") {
        CHECK(capture([] { parse_cve_records(R"({"items":[]})"); }).code() == ErrorCode::format);
        CHECK(capture([] { parse_cve_records("[1,2,3]"); }).code() == ErrorCode::format);
        auto missing = capture([] {
            parse_cve_records("{\"cve_id\":\"CVE-2020-0001\",\"published\":\"2020-01-01\"}\n{\"published\":\"2020-01-01\"}\n");
        });
        CHECK(missing.code() == ErrorCode::record);
        CHECK(missing.position() == 1u);
        CHECK(capture([] { parse_cve_records(R"({"cve_id":"CVE-2020-0001","published":"2020-01-01","base_score":11})"); })
                  .code() == ErrorCode::range);
        CHECK(capture([] { parse_cve_records("{\"cve_id\":\"CVE-2020-0001\"\n"); }).code() == ErrorCode::parse);
        CHECK(parse_cve_records("").empty());
    }

    TEST_CASE("CWE normalization") {
        CHECK(normalize_cwe("CWE-79") == "CWE-79");
        CHECK(normalize_cwe("cwe-079") == "CWE-79");
        CHECK(normalize_cwe(" 787 ") == "CWE-787");
        CHECK_FALSE(normalize_cwe("NVD-CWE-noinfo"));
        CHECK_FALSE(normalize_cwe("NVD-CWE-Other"));
        CHECK_FALSE(normalize_cwe("CWE-"));
        CHECK_FALSE(normalize_cwe("CWE-7a9"));
    }
}
