#include "tokparity/remote_scorer.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tokparity/hash.hpp"

namespace tokparity {

RemoteScorer::RemoteScorer(const std::string& endpoint_url, RemoteOptions options)
    : options_(std::move(options)) {
    std::string rest = endpoint_url;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
    else if (rest.rfind("https://", 0) == 0)
        throw std::invalid_argument("https endpoints are not supported: " + endpoint_url);
    const auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    if (slash != std::string::npos && slash + 1 < rest.size()) path_ = rest.substr(slash);
    const auto colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
    } else {
        host_ = hostport.substr(0, colon);
        port_ = std::stoi(hostport.substr(colon + 1));
    }
    if (host_.empty()) throw std::invalid_argument("endpoint has no host: " + endpoint_url);
}

std::string RemoteScorer::post_with_retries(const std::string& body) {
    std::string last_error;
    for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
        if (attempt > 0) {
            const int delay = options_.backoff_base_ms << (attempt - 1);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        ++network_calls_;
        httplib::Client client(host_, port_);
        client.set_connection_timeout(options_.timeout_sec, 0);
        client.set_read_timeout(options_.timeout_sec, 0);
        auto res = client.Post(path_, body, "application/json");
        if (res && res->status == 200) return res->body;
        if (res) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            last_error = "transport error: " + httplib::to_string(res.error());
        }
    }
    throw std::runtime_error("remote scorer failed after " + std::to_string(options_.max_attempts) +
                             " attempts (" + last_error + ")");
}

std::map<std::string, double> RemoteScorer::score_map(const std::string& context,
                                                      const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("remote scoring needs at least one candidate");
    nlohmann::json request;
    request["context"] = context;
    request["candidates"] = candidates;
    const std::string body = request.dump();

    std::filesystem::path cache_file;
    if (!options_.cache_dir.empty()) {
        std::filesystem::create_directories(options_.cache_dir);
        cache_file = std::filesystem::path(options_.cache_dir) / (hex64(fnv1a(body)) + ".json");
    }

    std::string response_text;
    if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
        std::ifstream in(cache_file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        response_text = buf.str();
    } else {
        response_text = post_with_retries(body);
        if (!cache_file.empty()) {
            std::ofstream out(cache_file, std::ios::binary);
            out << response_text;
        }
    }

    nlohmann::json response;
    try {
        response = nlohmann::json::parse(response_text);
    } catch (const nlohmann::json::parse_error&) {
        std::cerr << "remote scorer: unparseable payload: " << response_text << "\n";
        throw std::runtime_error("remote scorer returned malformed JSON");
    }
    if (!response.contains("logprobs") || !response["logprobs"].is_object()) {
        std::cerr << "remote scorer: unexpected payload: " << response_text << "\n";
        throw std::runtime_error("remote scorer response lacks a 'logprobs' object");
    }
    std::map<std::string, double> out;
    for (const auto& cand : candidates) {
        if (!response["logprobs"].contains(cand)) {
            std::cerr << "remote scorer: missing candidate in payload: " << response_text << "\n";
            throw std::runtime_error("remote scorer response is missing candidate: " + cand);
        }
        out[cand] = response["logprobs"][cand].get<double>();
    }
    return out;
}

std::vector<CandidateScore> RemoteScorer::score(const std::string& context,
                                                const std::vector<std::string>& candidates) {
    const auto scores = score_map(context, candidates);
    std::vector<CandidateScore> out;
    out.reserve(candidates.size());
    for (const auto& cand : candidates) out.push_back({scores.at(cand), 1});
    return out;
}

}  // namespace tokparity
