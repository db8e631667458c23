// Exercises the shared library through lsd.h only.
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "lsd/lsd.h"

namespace {

const std::string fixtures = LSD_FIXTURES;

std::string take(char* s) {
    std::string out(s);
    lsd_string_free(s);
    return out;
}

lsd_model* surface_model(uint32_t d, double p) {
    lsd_code* code = nullptr;
    REQUIRE(lsd_code_surface(d, &code) == LSD_OK);
    lsd_model* model = nullptr;
    REQUIRE(lsd_model_code_capacity(code, LSD_SIDE_Z, p, &model) == LSD_OK);
    lsd_code_free(code);
    return model;
}

}  // namespace

TEST_CASE("status strings and argument checks") {
    CHECK(std::string(lsd_status_string(LSD_OK)) == "ok");
    CHECK(std::strlen(lsd_status_string(LSD_ERR_UNSATISFIABLE)) > 0);
    lsd_code* code = nullptr;
    CHECK(lsd_code_surface(4, &code) == LSD_ERR_INVALID_ARGUMENT);
    CHECK(code == nullptr);
    CHECK(std::string(lsd_last_error()).find("odd") != std::string::npos);
    CHECK(lsd_code_surface(3, nullptr) == LSD_ERR_INVALID_ARGUMENT);
    lsd_model* model = nullptr;
    CHECK(lsd_model_load("/nonexistent.dem", &model) == LSD_ERR_IO);
    CHECK(lsd_model_parse("qdem 1 1 1 0\nf 2 d 0\n", &model) == LSD_ERR_PARSE);
    CHECK(std::string(lsd_last_error()).find("line 2") != std::string::npos);
    // Freeing null handles is a no-op.
    lsd_code_free(nullptr);
    lsd_model_free(nullptr);
    lsd_decoder_free(nullptr);
    lsd_records_free(nullptr);
    lsd_string_free(nullptr);
}

TEST_CASE("code handles") {
    lsd_code* code = nullptr;
    REQUIRE(lsd_code_surface(5, &code) == LSD_OK);
    CHECK(lsd_code_n(code) == 25);
    CHECK(lsd_code_k(code) == 1);
    CHECK(lsd_code_checks(code, LSD_SIDE_X) == 12);
    CHECK(lsd_code_commutes(code) == 1);
    lsd_code_free(code);

    REQUIRE(lsd_code_hgp_files((fixtures + "/hgp_seed_15x20.txt").c_str(), nullptr, &code) == LSD_OK);
    CHECK(lsd_code_n(code) == 625);
    CHECK(lsd_code_k(code) == 25);
    lsd_code_free(code);

    REQUIRE(lsd_code_bb_file((fixtures + "/bb_144_12_12.txt").c_str(), &code) == LSD_OK);
    CHECK(lsd_code_n(code) == 144);
    CHECK(lsd_code_k(code) == 12);
    CHECK(lsd_code_commutes(code) == 1);
    lsd_code_free(code);

    const uint32_t a[] = {3, 0, 0, 1, 0, 2}, b[] = {0, 3, 1, 0, 2, 0};
    REQUIRE(lsd_code_bivariate_bicycle(12, 6, a, 3, b, 3, &code) == LSD_OK);
    CHECK(lsd_code_k(code) == 12);
    lsd_code_free(code);
    CHECK(lsd_code_bivariate_bicycle(12, 6, a, 0, b, 3, &code) == LSD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("model text round trip") {
    lsd_model* model = nullptr;
    REQUIRE(lsd_model_load((fixtures + "/surface_d3_z.dem").c_str(), &model) == LSD_OK);
    CHECK(lsd_model_num_detectors(model) == 4);
    CHECK(lsd_model_num_faults(model) == 9);
    CHECK(lsd_model_num_observables(model) == 1);
    CHECK(lsd_model_mean_prior(model) == doctest::Approx(0.1));
    char* text = nullptr;
    REQUIRE(lsd_model_format(model, &text) == LSD_OK);
    const std::string first = take(text);
    lsd_model* again = nullptr;
    REQUIRE(lsd_model_parse(first.c_str(), &again) == LSD_OK);
    REQUIRE(lsd_model_format(again, &text) == LSD_OK);
    CHECK(take(text) == first);
    lsd_model_free(again);
    lsd_model_free(model);
}

TEST_CASE("decoding through the C interface") {
    lsd_model* model = nullptr;
    REQUIRE(lsd_model_load((fixtures + "/repetition_d3.dem").c_str(), &model) == LSD_OK);
    lsd_decoder_config cfg;
    lsd_decoder_config_default(&cfg);
    CHECK(cfg.use_bp == 1);
    CHECK(cfg.post == LSD_POST_LSD);
    CHECK(cfg.bp_iterations == 30);
    lsd_decoder* dec = nullptr;
    REQUIRE(lsd_decoder_create(model, &cfg, &dec) == LSD_OK);

    const uint32_t s[] = {0, 1};
    uint32_t corr[3];
    size_t len = 99;
    lsd_decode_info info{};
    REQUIRE(lsd_decoder_decode(dec, s, 2, corr, 3, &len, &info) == LSD_OK);
    REQUIRE(len == 1);
    CHECK(corr[0] == 1);
    int ok = 0;
    REQUIRE(lsd_model_check(model, corr, len, s, 2, &ok) == LSD_OK);
    CHECK(ok == 1);

    REQUIRE(lsd_decoder_decode(dec, nullptr, 0, corr, 3, &len, nullptr) == LSD_OK);
    CHECK(len == 0);
    CHECK(lsd_decoder_decode(dec, s, 2, corr, 0, &len, nullptr) == LSD_ERR_BUFFER_TOO_SMALL);
    CHECK(len == 1);
    const uint32_t out_of_range[] = {7};
    CHECK(lsd_decoder_decode(dec, out_of_range, 1, corr, 3, &len, nullptr) == LSD_ERR_INVALID_ARGUMENT);
    lsd_decoder_free(dec);

    cfg.post = LSD_POST_OSD;
    cfg.osd = LSD_OSD_E;
    cfg.osd_order = 2;
    char* text = nullptr;
    REQUIRE(lsd_decoder_config_describe(&cfg, &text) == LSD_OK);
    CHECK(take(text).find("osd") != std::string::npos);
    REQUIRE(lsd_decoder_create(model, &cfg, &dec) == LSD_OK);
    REQUIRE(lsd_decoder_decode(dec, s, 2, corr, 3, &len, nullptr) == LSD_OK);
    CHECK(len == 1);
    lsd_decoder_free(dec);

    cfg.osd = LSD_OSD_0;
    cfg.osd_order = 3;
    CHECK(lsd_decoder_create(model, &cfg, &dec) == LSD_ERR_INVALID_ARGUMENT);
    lsd_model_free(model);
}

TEST_CASE("unsatisfiable syndromes") {
    lsd_model* model = nullptr;
    REQUIRE(lsd_model_parse("qdem 1 2 1 0\nf 0.1 d 0 1\n", &model) == LSD_OK);
    lsd_decoder_config cfg;
    lsd_decoder_config_default(&cfg);
    cfg.use_bp = 0;
    lsd_decoder* dec = nullptr;
    REQUIRE(lsd_decoder_create(model, &cfg, &dec) == LSD_OK);
    const uint32_t s[] = {0};
    uint32_t corr[1];
    size_t len = 0;
    CHECK(lsd_decoder_decode(dec, s, 1, corr, 1, &len, nullptr) == LSD_ERR_UNSATISFIABLE);
    lsd_decoder_free(dec);
    lsd_model_free(model);
}

TEST_CASE("windowed decoder handle") {
    lsd_code* code = nullptr;
    REQUIRE(lsd_code_repetition(5, &code) == LSD_OK);
    lsd_model* model = nullptr;
    REQUIRE(lsd_model_phenomenological(code, LSD_SIDE_X, 0.05, 12, &model) == LSD_OK);
    CHECK(lsd_model_num_detectors(model) == 48);
    lsd_decoder_config cfg;
    lsd_decoder_config_default(&cfg);
    lsd_decoder* dec = nullptr;
    CHECK(lsd_windowed_decoder_create(model, &cfg, 12, 5, 3, 1, &dec) == LSD_ERR_INVALID_ARGUMENT);
    REQUIRE(lsd_windowed_decoder_create(model, &cfg, 12, 4, 3, 1, &dec) == LSD_OK);
    std::vector<uint32_t> s(48), corr(lsd_model_num_faults(model));
    for (uint64_t shot = 0; shot < 50; ++shot) {
        size_t slen = 0, clen = 0;
        REQUIRE(lsd_model_sample_syndrome(model, 3, shot, s.data(), s.size(), &slen) == LSD_OK);
        REQUIRE(lsd_decoder_decode(dec, s.data(), slen, corr.data(), corr.size(), &clen, nullptr) == LSD_OK);
        int ok = 0;
        REQUIRE(lsd_model_check(model, corr.data(), clen, s.data(), slen, &ok) == LSD_OK);
        CHECK(ok == 1);
    }
    lsd_decoder_free(dec);
    lsd_model_free(model);
    lsd_code_free(code);
}

TEST_CASE("Monte-Carlo runs and formatting") {
    lsd_model* model = surface_model(3, 0.05);
    lsd_decoder_config cfg;
    lsd_decoder_config_default(&cfg);
    lsd_run_options opts;
    lsd_run_options_default(&opts);
    opts.shots = 200;
    opts.seed = 4;
    opts.keep_records = 1;
    lsd_run_report a{}, b{};
    lsd_records* records = nullptr;
    REQUIRE(lsd_run(model, &cfg, &opts, 0.05, &a, &records) == LSD_OK);
    CHECK(a.shots == 200);
    CHECK(a.failures <= a.shots);
    CHECK(a.ci_lo <= a.p_l);
    CHECK(a.ci_hi >= a.p_l);
    CHECK(lsd_records_count(records) == 200);
    opts.threads = 3;
    opts.keep_records = 0;
    REQUIRE(lsd_run(model, &cfg, &opts, 0.05, &b, nullptr) == LSD_OK);
    CHECK(a.failures == b.failures);
    CHECK(a.mean_nu == b.mean_nu);

    const char* echo[] = {"capi test"};
    char* text = nullptr;
    REQUIRE(lsd_format_csv_header(echo, 1, &text) == LSD_OK);
    CHECK(take(text).rfind("# capi test\np,shots,failures,p_l,", 0) == 0);
    REQUIRE(lsd_format_csv_row(&a, &text) == LSD_OK);
    CHECK(take(text).rfind("0.05,200,", 0) == 0);
    REQUIRE(lsd_records_format_jsonl(records, 0.05, &text) == LSD_OK);
    const std::string jsonl = take(text);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 200);
    REQUIRE(lsd_records_format_stats(records, nullptr, 0, 0.05, &text) == LSD_OK);
    CHECK(take(text).rfind("p,source,statistic,", 0) == 0);
    lsd_records_free(records);

    opts.shots = 0;
    CHECK(lsd_run(model, &cfg, &opts, 0.05, &a, nullptr) == LSD_ERR_INVALID_ARGUMENT);
    lsd_model_free(model);
}

TEST_CASE("statistics helpers") {
    double v = 0.0;
    REQUIRE(lsd_bethe_avg_cluster(0.001, 139, &v) == LSD_OK);
    CHECK(std::abs(v - 1.001 / 0.862) <= 1e-9 * v);
    CHECK(lsd_bethe_avg_cluster(0.5, 139, &v) == LSD_ERR_DOMAIN);
    REQUIRE(lsd_per_cycle_rate(0.2, 12, &v) == LSD_OK);
    CHECK(v == doctest::Approx(0.018423).epsilon(1e-5));
    double lo = 0, hi = 0;
    REQUIRE(lsd_wilson_interval(5, 100, &lo, &hi) == LSD_OK);
    CHECK(lo < 0.05);
    CHECK(hi > 0.05);
}

TEST_CASE("random regular matrix writer") {
    const std::string path = "capi_regular.txt";
    REQUIRE(lsd_random_regular_write(9, 12, 3, 4, 2, 1, path.c_str()) == LSD_OK);
    lsd_code* code = nullptr;
    REQUIRE(lsd_code_hgp_files(path.c_str(), path.c_str(), &code) == LSD_OK);
    CHECK(lsd_code_n(code) == 12 * 12 + 9 * 9);
    CHECK(lsd_code_k(code) == 9);
    lsd_code_free(code);
    std::remove(path.c_str());
    CHECK(lsd_random_regular_write(9, 12, 3, 3, 2, 1, path.c_str()) == LSD_ERR_INVALID_ARGUMENT);
    CHECK(lsd_random_regular_write(9, 12, 3, 4, 2, 1, "/nonexistent/dir/h.txt") == LSD_ERR_IO);
}
