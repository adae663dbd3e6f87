// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/remote_backend.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "recap/errors.hpp"

namespace recap {

using nlohmann::json;

namespace {

Vector to_vector(const json &j) { return j.get<Vector>(); }

std::vector<Vector> to_rows(const json &j) { return j.get<std::vector<Vector>>(); }

json rows_json(std::span<const Vector> rows) { return json(std::vector<Vector>(rows.begin(), rows.end())); }

class Connection {
  public:
    explicit Connection(std::string url) : url_(std::move(url)) {}

    [[nodiscard]] json call(const std::string &route, const json &body) const {
        httplib::Client client(url_);
        client.set_read_timeout(120, 0);
        const auto res = client.Post(route, body.dump(), "application/json");
        if (!res) {
            throw DataError("remote backend " + url_ + route + ": " + httplib::to_string(res.error()));
        }
        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::parse_error &e) {
            throw DataError("remote backend " + url_ + route + ": malformed reply");
        }
        if (res->status != 200) {
            const std::string kind = reply.value("kind", "");
            const std::string msg = reply.value("error", "status " + std::to_string(res->status));
            if (kind == "input") throw InputError(msg);
            if (kind == "config") throw ConfigError(msg);
            throw DataError("remote backend " + route + ": " + msg);
        }
        return reply;
    }

  private:
    std::string url_;
};

struct RemoteInfo {
    std::size_t vision_dim = 0;
    std::size_t lm_width = 0;
    std::vector<std::string> vocabulary;
    json checksums;
};

class RemoteVideoEncoder final : public VideoEncoder {
  public:
    RemoteVideoEncoder(std::shared_ptr<Connection> c, const RemoteInfo &info)
        : c_(std::move(c)), dim_(info.vision_dim), checksum_(info.checksums["video"].get<std::uint64_t>()) {}

    [[nodiscard]] std::size_t embedding_dim() const override { return dim_; }
    [[nodiscard]] EmbeddingVector encode_text(std::string_view text) const override {
        return EmbeddingVector::from_unit(to_vector(c_->call("/video/encode_text", {{"text", text}})["embedding"]));
    }
    [[nodiscard]] EmbeddingVector encode_frames(std::span<const Frame> frames) const override {
        json rows = json::array();
        for (const auto &f : frames) {
            rows.push_back({{"id", f.id}, {"features", f.features}});
        }
        return EmbeddingVector::from_unit(to_vector(c_->call("/video/encode_frames", {{"frames", rows}})["embedding"]));
    }
    [[nodiscard]] std::uint64_t parameter_checksum() const override { return checksum_; }

  private:
    std::shared_ptr<Connection> c_;
    std::size_t dim_;
    std::uint64_t checksum_;
};

class RemoteImageTextScorer final : public ImageTextScorer {
  public:
    RemoteImageTextScorer(std::shared_ptr<Connection> c, const RemoteInfo &info)
        : c_(std::move(c)), dim_(info.vision_dim), checksum_(info.checksums["image_text"].get<std::uint64_t>()) {}

    [[nodiscard]] std::size_t embedding_dim() const override { return dim_; }
    [[nodiscard]] EmbeddingVector embed_image(const Frame &frame) const override {
        const json body = {{"id", frame.id}, {"features", frame.features}};
        return EmbeddingVector::from_unit(to_vector(c_->call("/image/embed_image", body)["embedding"]));
    }
    [[nodiscard]] EmbeddingVector embed_text(std::string_view text) const override {
        return EmbeddingVector::from_unit(to_vector(c_->call("/image/embed_text", {{"text", text}})["embedding"]));
    }
    [[nodiscard]] std::uint64_t parameter_checksum() const override { return checksum_; }

  private:
    std::shared_ptr<Connection> c_;
    std::size_t dim_;
    std::uint64_t checksum_;
};

class RemoteSentenceScorer final : public SentenceScorer {
  public:
    RemoteSentenceScorer(std::shared_ptr<Connection> c, const RemoteInfo &info)
        : c_(std::move(c)), checksum_(info.checksums["sentence"].get<std::uint64_t>()) {}

    [[nodiscard]] double similarity(std::string_view a, std::string_view b) const override {
        return c_->call("/sentence/similarity", {{"a", a}, {"b", b}})["value"].get<double>();
    }
    [[nodiscard]] std::vector<double> similarity_matrix(std::span<const std::string> a,
                                                        std::span<const std::string> b) const override {
        const json body = {{"a", std::vector<std::string>(a.begin(), a.end())},
                           {"b", std::vector<std::string>(b.begin(), b.end())}};
        return to_vector(c_->call("/sentence/similarity_matrix", body)["values"]);
    }
    [[nodiscard]] std::uint64_t parameter_checksum() const override { return checksum_; }

  private:
    std::shared_ptr<Connection> c_;
    std::uint64_t checksum_;
};

class RemoteCausalLm final : public CausalLm {
  public:
    RemoteCausalLm(std::shared_ptr<Connection> c, const RemoteInfo &info)
        : c_(std::move(c)),
          tokenizer_(info.vocabulary),
          width_(info.lm_width),
          checksum_(info.checksums["lm"].get<std::uint64_t>()) {}

    [[nodiscard]] const Tokenizer &tokenizer() const override { return tokenizer_; }
    [[nodiscard]] std::size_t embedding_width() const override { return width_; }
    [[nodiscard]] Vector token_embedding(TokenId id) const override {
        return to_vector(c_->call("/lm/token_embedding", {{"id", id}})["embedding"]);
    }
    [[nodiscard]] Vector next_logits(std::span<const Vector> prefix, std::span<const TokenId> tokens) const override {
        const json body = {{"prefix", rows_json(prefix)}, {"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}};
        return to_vector(c_->call("/lm/next_logits", body)["logits"]);
    }
    [[nodiscard]] std::vector<Vector> prefix_gradient(std::span<const Vector> prefix, std::span<const TokenId> tokens,
                                                      std::span<const double> grad_logits) const override {
        const json body = {{"prefix", rows_json(prefix)},
                           {"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())},
                           {"grad_logits", Vector(grad_logits.begin(), grad_logits.end())}};
        return to_rows(c_->call("/lm/prefix_gradient", body)["gradient"]);
    }
    [[nodiscard]] std::uint64_t parameter_checksum() const override { return checksum_; }

  private:
    std::shared_ptr<Connection> c_;
    Tokenizer tokenizer_;
    std::size_t width_;
    std::uint64_t checksum_;
};

std::vector<Frame> frames_from_json(const json &rows) {
    std::vector<Frame> frames;
    for (const auto &r : rows) {
        frames.push_back({r.at("id").get<std::string>(), to_vector(r.at("features"))});
    }
    return frames;
}

json embedding_json(const EmbeddingVector &e) {
    return {{"embedding", Vector(e.values().begin(), e.values().end())}};
}

}  // namespace

BackendSuite make_remote_backends(const std::string &url) {
    auto c = std::make_shared<Connection>(url);
    const json j = c->call("/info", json::object());
    RemoteInfo info;
    info.vision_dim = j.at("vision_dim").get<std::size_t>();
    info.lm_width = j.at("lm_width").get<std::size_t>();
    info.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    info.checksums = j.at("checksums");
    BackendSuite suite;
    suite.video_encoder = std::make_shared<RemoteVideoEncoder>(c, info);
    suite.image_text = std::make_shared<RemoteImageTextScorer>(c, info);
    suite.lm = std::make_shared<RemoteCausalLm>(c, info);
    suite.sentence = std::make_shared<RemoteSentenceScorer>(c, info);
    return suite;
}

struct BackendServer::Impl {
    BackendSuite backends;
    httplib::Server server;
    std::thread thread;

    void route(const std::string &path, std::function<json(const json &)> handler) {
        server.Post(path, [handler = std::move(handler)](const httplib::Request &req, httplib::Response &res) {
            json reply;
            try {
                reply = handler(req.body.empty() ? json::object() : json::parse(req.body));
            } catch (const InputError &e) {
                reply = {{"error", e.what()}, {"kind", "input"}};
                res.status = 400;
            } catch (const ConfigError &e) {
                reply = {{"error", e.what()}, {"kind", "config"}};
                res.status = 400;
            } catch (const std::exception &e) {
                reply = {{"error", e.what()}, {"kind", "internal"}};
                res.status = 500;
            }
            res.set_content(reply.dump(), "application/json");
        });
    }

    void install() {
        const BackendSuite &b = backends;
        route("/info", [&b](const json &) {
            const Tokenizer &tok = b.lm->tokenizer();
            std::vector<std::string> vocab;
            for (std::size_t i = 0; i < tok.size(); ++i) {
                vocab.push_back(tok.token_text(static_cast<TokenId>(i)));
            }
            return json{{"vision_dim", b.video_encoder->embedding_dim()},
                        {"lm_width", b.lm->embedding_width()},
                        {"vocabulary", vocab},
                        {"checksums",
                         {{"video", b.video_encoder->parameter_checksum()},
                          {"image_text", b.image_text->parameter_checksum()},
                          {"lm", b.lm->parameter_checksum()},
                          {"sentence", b.sentence->parameter_checksum()}}}};
        });
        route("/video/encode_text",
              [&b](const json &j) { return embedding_json(b.video_encoder->encode_text(j.at("text").get<std::string>())); });
        route("/video/encode_frames", [&b](const json &j) {
            const auto frames = frames_from_json(j.at("frames"));
            return embedding_json(b.video_encoder->encode_frames(frames));
        });
        route("/image/embed_image", [&b](const json &j) {
            return embedding_json(b.image_text->embed_image({j.at("id").get<std::string>(), to_vector(j.at("features"))}));
        });
        route("/image/embed_text",
              [&b](const json &j) { return embedding_json(b.image_text->embed_text(j.at("text").get<std::string>())); });
        route("/lm/token_embedding",
              [&b](const json &j) { return json{{"embedding", b.lm->token_embedding(j.at("id").get<TokenId>())}}; });
        route("/lm/next_logits", [&b](const json &j) {
            const auto prefix = to_rows(j.at("prefix"));
            const auto tokens = j.at("tokens").get<std::vector<TokenId>>();
            b.lm->check_inputs(prefix, tokens);
            return json{{"logits", b.lm->next_logits(prefix, tokens)}};
        });
        route("/lm/prefix_gradient", [&b](const json &j) {
            const auto prefix = to_rows(j.at("prefix"));
            const auto tokens = j.at("tokens").get<std::vector<TokenId>>();
            const auto grad = to_vector(j.at("grad_logits"));
            b.lm->check_inputs(prefix, tokens);
            return json{{"gradient", b.lm->prefix_gradient(prefix, tokens, grad)}};
        });
        route("/sentence/similarity", [&b](const json &j) {
            return json{{"value", b.sentence->similarity(j.at("a").get<std::string>(), j.at("b").get<std::string>())}};
        });
        route("/sentence/similarity_matrix", [&b](const json &j) {
            const auto a = j.at("a").get<std::vector<std::string>>();
            const auto bb = j.at("b").get<std::vector<std::string>>();
            return json{{"values", b.sentence->similarity_matrix(a, bb)}};
        });
    }
};

BackendServer::BackendServer(BackendSuite backends) : impl_(std::make_unique<Impl>()) {
    impl_->backends = std::move(backends);
    impl_->install();
}

BackendServer::~BackendServer() { stop(); }

int BackendServer::start(const std::string &host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw DataError("backend server: cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void BackendServer::listen(const std::string &host, int port) {
    if (!impl_->server.listen(host, port)) {
        throw DataError("backend server: cannot listen on " + host + ":" + std::to_string(port));
    }
}

void BackendServer::stop() {
    if (!impl_) {
        return;
    }
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

}  // namespace recap
