#include "lcm/error.hpp"
#include "lcm/evaluation/report.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

namespace lcm {
namespace {

RecallReport sample_report()
{
    RecallReport r;
    r.dataset = "synthetic";
    r.split = "test";
    r.model = "lcm";
    r.direction = Direction::TextToImage;
    r.sample_size = 2000;
    r.pool_size = 800;
    r.seeds = {0, 1, 2};
    r.k_values = {1, 5};
    r.per_k = {{1, 0.17, 0.0035, {0.1, 0.2, 0.21}}, {5, 0.4, 0.0044, {0.3, 0.5, 0.4000000000000001}}};
    return r;
}

TEST(Report, CellFormat)
{
    EXPECT_EQ(format_cell(0.17, 0.0035), "17.0\xC2\xB1" "0.35");
    EXPECT_EQ(format_cell(1.0, 0.0), "100.0\xC2\xB1" "0.00");
}

TEST(Report, TableLayout)
{
    const auto text = render_report(sample_report(), ReportFormat::Table);
    EXPECT_NE(text.find("text-to-image"), std::string::npos);
    EXPECT_NE(text.find("R@1"), std::string::npos);
    EXPECT_NE(text.find("17.0\xC2\xB1" "0.35"), std::string::npos);
    EXPECT_NE(text.find("40.0\xC2\xB1" "0.44"), std::string::npos);
    // published reference rows, never computed
    EXPECT_NE(text.find("8.5\xC2\xB1" "0.17"), std::string::npos);
    EXPECT_NE(text.find("79.0\xC2\xB1" "0.58"), std::string::npos);
}

TEST(Report, JsonRoundTrip)
{
    const auto r = sample_report();
    const auto text = render_report(r, ReportFormat::Json);
    EXPECT_EQ(report_from_json(text), r);
    const auto j = nlohmann::json::parse(text);
    for (const char* key : {"dataset", "direction", "sample_size", "seeds", "k_values", "per_k"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["per_k"][0]["stderr"].get<double>(), 0.0035);
    EXPECT_FALSE(j["single_seed"].get<bool>());
}

TEST(Report, InvalidReportsAreRejected)
{
    auto r = sample_report();
    r.k_values.clear();
    EXPECT_THROW(render_report(r, ReportFormat::Table), Error);
    r = sample_report();
    r.per_k[0].per_seed.pop_back();
    EXPECT_THROW(render_report(r, ReportFormat::Json), Error);
    r = sample_report();
    r.per_k[1].mean = 1.5;
    EXPECT_THROW(render_report(r, ReportFormat::Json), Error);
}

TEST(Report, BadJsonIsParseError)
{
    for (const char* bad : {"", "{", "{\"dataset\": 3}", "[]"}) {
        try {
            report_from_json(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Parse) << bad;
        }
    }
}

} // namespace
} // namespace lcm
