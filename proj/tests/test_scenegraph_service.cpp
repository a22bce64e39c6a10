#include <doctest.h>

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "splatgraph/errors.hpp"
#include "splatgraph/image.hpp"
#include "splatgraph/json_util.hpp"
#include "splatgraph/scenegraph.hpp"

// Last: pulls <resolv.h>, whose _res macro corrupts Eigen parameter lists.
#include <httplib.h>
#ifdef _res
#undef _res
#endif

using namespace splatgraph;

namespace {

// Independent decoder so the test does not trust the backend's encoder.
std::vector<std::uint8_t> base64_decode(const std::string& text) {
    static const std::string table =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::vector<std::uint8_t> out;
    int acc = 0, bits = 0;
    for (char c : text) {
        if (c == '=') break;
        const auto pos = table.find(c);
        REQUIRE(pos != std::string::npos);
        acc = (acc << 6) | int(pos);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(std::uint8_t((acc >> bits) & 0xff));
        }
    }
    return out;
}

ImageRGBA8 tiny_image() {
    ImageRGBA8 img(4, 3);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            auto* p = img.pixel(x, y);
            p[0] = std::uint8_t(40 * x);
            p[1] = std::uint8_t(80 * y);
            p[2] = 200;
            p[3] = 255;
        }
    return img;
}

std::string triplet_reply() {
    Json reply;
    reply["triplets"] = Json::array(
        {Json{{"child", "1"}, {"relation", "supported_by"}, {"parent", "Floor"}},
         Json{{"child", "2"}, {"relation", "attached_to"}, {"parent", "1"}}});
    return reply.dump();
}

// In-process service fixture. The handler runs on the server thread; captured
// state is read only after the client call returns.
struct TestService {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestService(std::function<void(const httplib::Request&, httplib::Response&)> handler,
                         const std::string& route = "/infer") {
        server.Post(route, std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestService() {
        server.stop();
        thread.join();
    }
    std::string url(const std::string& path = "") const {
        return "http://127.0.0.1:" + std::to_string(port) + path;
    }
};

}  // namespace

TEST_CASE("service backend posts the render and parses the reply") {
    std::string seen_body;
    TestService service([&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        res.set_content(triplet_reply(), "application/json");
    });

    ExternalServiceBackend backend(service.url(), 2.0);
    CHECK(backend.needs_images());

    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1, 2};
    req.image = &img;
    const auto out = backend.infer(req);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == RelationTriplet{1, Relation::SupportedBy, kFloorNode});
    CHECK(out[1] == RelationTriplet{2, Relation::AttachedTo, 1});

    const Json body = parse_json(seen_body, "captured request");
    CHECK(body["prompt_version"] == "relations_v1");
    CHECK(body["instance_ids"] == Json::array({1, 2}));

    // The image field must decode to the PNG the backend rendered.
    const auto png = base64_decode(body["image"].get<std::string>());
    const auto expect = encode_png(img);
    CHECK(png == expect);
    REQUIRE(png.size() > 8);
    CHECK(png[0] == 0x89);
    CHECK(png[1] == 'P');
    CHECK(png[2] == 'N');
    CHECK(png[3] == 'G');
}

TEST_CASE("service backend narrows instance ids to allowed children") {
    std::string seen_body;
    TestService service([&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        res.set_content(triplet_reply(), "application/json");
    });
    ExternalServiceBackend backend(service.url(), 2.0);
    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1, 2, 3};
    req.allowed_children = {2};
    req.image = &img;
    backend.infer(req);
    CHECK(parse_json(seen_body, "captured")["instance_ids"] == Json::array({2}));
}

TEST_CASE("service backend honors a custom path and prompt version") {
    std::atomic<int> hits{0};
    TestService service(
        [&](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            CHECK(parse_json(req.body, "captured")["prompt_version"] == "relations_v2");
            res.set_content(triplet_reply(), "application/json");
        },
        "/lab/relations");
    ExternalServiceBackend backend(service.url("/lab/relations"), 2.0, "relations_v2");
    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1};
    req.image = &img;
    CHECK(backend.infer(req).size() == 2);
    CHECK(hits == 1);
}

TEST_CASE("service backend retries transient failures") {
    std::atomic<int> hits{0};
    TestService service([&](const httplib::Request&, httplib::Response& res) {
        if (++hits < 3) {
            res.status = 500;
            return;
        }
        res.set_content(triplet_reply(), "application/json");
    });
    ExternalServiceBackend backend(service.url(), 2.0);
    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1};
    req.image = &img;
    CHECK(backend.infer(req).size() == 2);
    CHECK(hits == 3);
}

TEST_CASE("service backend gives up after three attempts") {
    std::atomic<int> hits{0};
    TestService service([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    ExternalServiceBackend backend(service.url(), 2.0);
    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1};
    req.image = &img;
    try {
        backend.infer(req);
        CHECK(false);
    } catch (const BackendError& e) {
        const std::string what = e.what();
        CHECK(what.find("http status 503") != std::string::npos);
        CHECK(what.find("/infer") != std::string::npos);
    }
    CHECK(hits == 3);
}

TEST_CASE("service backend rejects replies without a triplet list") {
    std::atomic<int> hits{0};
    TestService service([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content("{\"answer\": 42}", "application/json");
    });
    ExternalServiceBackend backend(service.url(), 2.0);
    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1};
    req.image = &img;
    CHECK_THROWS_AS(backend.infer(req), BackendError);
    CHECK(hits == 3);  // malformed replies are retried like failures
}

TEST_CASE("service backend reports unreachable hosts") {
    // Reserved port 9 on localhost: nothing listens there.
    ExternalServiceBackend backend("http://127.0.0.1:9", 0.25);
    const ImageRGBA8 img = tiny_image();
    InferenceRequest req;
    req.visible_ids = {1};
    req.image = &img;
    try {
        backend.infer(req);
        CHECK(false);
    } catch (const BackendError& e) {
        CHECK(std::string(e.what()).find("request failed") != std::string::npos);
    }
}

TEST_CASE("service backend validates its inputs") {
    CHECK_THROWS_AS(ExternalServiceBackend("ftp://example.org"), ValidationError);
    CHECK_THROWS_AS(ExternalServiceBackend("http://"), ValidationError);
    CHECK_THROWS_AS(ExternalServiceBackend("not a url"), ValidationError);
    CHECK_THROWS_AS(ExternalServiceBackend("http://host", 0.0), ValidationError);

    ExternalServiceBackend backend("http://127.0.0.1:9", 0.25);
    InferenceRequest req;
    req.visible_ids = {1};  // no image attached
    CHECK_THROWS_AS(backend.infer(req), ValidationError);
}
