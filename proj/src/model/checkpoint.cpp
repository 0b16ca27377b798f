// Copyright 2026 The MAIFormer Authors
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


#include "maiformer/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "maiformer/model/weights.hpp"
#include "maiformer/util/hash.hpp"

namespace maiformer::model {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'I', 'F', 'C', 'K', 'P', 'T'};

class Writer {
public:
    void bytes(const void *p, std::size_t n) {
        const auto *c = static_cast<const char *>(p);
        buf_.append(c, n);
    }
    template <typename U>
    void uint(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    template <typename T>
    void real(T v) {
        if constexpr (sizeof(T) == 4) {
            uint(std::bit_cast<std::uint32_t>(v));
        } else {
            uint(std::bit_cast<std::uint64_t>(v));
        }
    }
    void string(const std::string &s) {
        uint(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    const std::string &data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(const std::string &buf, const std::filesystem::path &path) : buf_(buf), path_(path) {}
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) throw corrupt("truncated");
    }
    template <typename U>
    U uint() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }
    template <typename T>
    T real() {
        if constexpr (sizeof(T) == 4) {
            return std::bit_cast<T>(uint<std::uint32_t>());
        } else {
            return std::bit_cast<T>(uint<std::uint64_t>());
        }
    }
    std::string string(std::size_t n) {
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    CheckpointError corrupt(const std::string &why) const {
        return CheckpointError(CheckpointError::Kind::corrupt, path_.string() + ": corrupt checkpoint (" + why + ")");
    }

private:
    const std::string &buf_;
    const std::filesystem::path &path_;
    std::size_t pos_ = 0;
};

template <typename T>
void put_array(Writer &w, const std::string &name, const num::Array<T> &a) {
    w.string(name);
    w.uint(static_cast<std::uint32_t>(a.rank()));
    for (std::size_t e : a.shape()) w.uint(static_cast<std::uint64_t>(e));
    for (T v : a.values()) w.real(v);
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open checkpoint " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct Parsed {
    CheckpointInfo info;
    std::size_t arrays_at = 0;
};

Parsed parse_prefix(const std::string &buf, const std::filesystem::path &path) {
    Reader r(buf, path);
    if (buf.size() < sizeof(kMagic) + 8 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
        throw r.corrupt("bad magic");
    }
    r.string(sizeof(kMagic));
    Parsed p;
    p.info.version = r.uint<std::uint32_t>();
    if (p.info.version != kCheckpointVersion) {
        throw CheckpointError(CheckpointError::Kind::version_mismatch,
                              path.string() + ": checkpoint version " + std::to_string(p.info.version) +
                                  ", this build reads version " + std::to_string(kCheckpointVersion));
    }
    if (buf.size() < 8) throw r.corrupt("truncated");
    const std::size_t body = buf.size() - 8;
    std::uint64_t stored = 0;
    for (std::size_t i = 0; i < 8; ++i)
        stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[body + i])) << (8 * i);
    if (util::fnv1a64(std::string_view(buf.data(), body)) != stored) throw r.corrupt("checksum mismatch");
    p.info.element_bytes = r.uint<std::uint32_t>();
    if (p.info.element_bytes != 4 && p.info.element_bytes != 8) throw r.corrupt("bad element width");
    const auto n = r.uint<std::uint64_t>();
    try {
        p.info.header = nlohmann::json::parse(r.string(static_cast<std::size_t>(n)));
    } catch (const nlohmann::json::exception &e) {
        throw r.corrupt(std::string("header: ") + e.what());
    }
    p.arrays_at = r.pos();
    return p;
}

} // namespace

template <typename T>
void save_checkpoint(const std::filesystem::path &path, const Checkpoint<T> &ckpt) {
    check_weights(ckpt.config, ckpt.weights);
    nlohmann::json header = {{"config", to_json(ckpt.config)}, {"meta", ckpt.meta}};
    if (ckpt.norm_stats) {
        header["norm_stats"] = {{"text", data::to_text(*ckpt.norm_stats)},
                                {"hash", data::norm_stats_hash(*ckpt.norm_stats)}};
    }
    if (ckpt.optimizer) {
        const auto &o = *ckpt.optimizer;
        if (o.first_moment.size() != ckpt.weights.size()) {
            throw std::invalid_argument("save_checkpoint: optimizer state does not match the weights");
        }
        // Doubles go through their bit patterns so the header stays exact.
        header["optimizer"] = {{"step", o.step},
                               {"learning_rate_bits", std::bit_cast<std::uint64_t>(o.learning_rate)},
                               {"beta1_bits", std::bit_cast<std::uint64_t>(o.hyper.beta1)},
                               {"beta2_bits", std::bit_cast<std::uint64_t>(o.hyper.beta2)},
                               {"epsilon_bits", std::bit_cast<std::uint64_t>(o.hyper.epsilon)}};
    }
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.uint(kCheckpointVersion);
    w.uint(static_cast<std::uint32_t>(sizeof(T)));
    const std::string head = header.dump();
    w.uint(static_cast<std::uint64_t>(head.size()));
    w.bytes(head.data(), head.size());
    const std::size_t count = ckpt.weights.size() * (ckpt.optimizer ? 3 : 1);
    w.uint(static_cast<std::uint64_t>(count));
    for (const auto &p : ckpt.weights.items()) put_array(w, "w/" + p.name, p.var.value());
    if (ckpt.optimizer) {
        const auto &items = ckpt.weights.items();
        for (std::size_t i = 0; i < items.size(); ++i) put_array(w, "m/" + items[i].name, ckpt.optimizer->first_moment[i]);
        for (std::size_t i = 0; i < items.size(); ++i) put_array(w, "v/" + items[i].name, ckpt.optimizer->second_moment[i]);
    }
    w.uint(util::fnv1a64(w.data()));

    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot write " + tmp);
        out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
        if (!out) throw CheckpointError(CheckpointError::Kind::io, "write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

CheckpointInfo inspect_checkpoint(const std::filesystem::path &path) {
    const std::string buf = read_file(path);
    return parse_prefix(buf, path).info;
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path &path) {
    const std::string buf = read_file(path);
    const Parsed p = parse_prefix(buf, path);
    if (p.info.element_bytes != sizeof(T)) {
        throw CheckpointError(CheckpointError::Kind::precision_mismatch,
                              path.string() + ": checkpoint stores " + std::to_string(8 * p.info.element_bytes) +
                                  "-bit values, requested " + std::to_string(8 * sizeof(T)) + "-bit");
    }
    Reader r(buf, path);
    r.string(p.arrays_at);
    Checkpoint<T> ck;
    const auto &h = p.info.header;
    try {
        ck.config = model_config_from_json(h.at("config"));
        ck.meta = h.at("meta");
        if (h.contains("norm_stats")) {
            ck.norm_stats = data::norm_stats_from_text(h.at("norm_stats").at("text").get<std::string>());
            if (data::norm_stats_hash(*ck.norm_stats) != h.at("norm_stats").at("hash").get<std::string>()) {
                throw r.corrupt("norm stats hash mismatch");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw r.corrupt(std::string("header: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw r.corrupt(std::string("header: ") + e.what());
    } catch (const data::DataError &e) {
        throw r.corrupt(std::string("header: ") + e.what());
    }

    const auto layout = weight_layout(ck.config);
    const bool has_opt = h.contains("optimizer");
    const auto count = r.uint<std::uint64_t>();
    if (count != layout.size() * (has_opt ? 3 : 1)) throw r.corrupt("unexpected array count");
    std::vector<num::Array<T>> arrays;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::string name = r.string(r.uint<std::uint32_t>());
        const std::size_t k = static_cast<std::size_t>(i % layout.size());
        const char *tag = i < layout.size() ? "w/" : (i < 2 * layout.size() ? "m/" : "v/");
        if (name != tag + layout[k].name) throw r.corrupt("unexpected array '" + name + "'");
        const auto rank = r.uint<std::uint32_t>();
        num::Shape shape;
        for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<std::size_t>(r.uint<std::uint64_t>()));
        if (shape != layout[k].shape) throw r.corrupt("shape mismatch for '" + name + "'");
        num::Array<T> a(shape);
        r.need(a.size() * sizeof(T));
        for (auto &v : a.values()) v = r.real<T>();
        if (i < layout.size()) {
            ck.weights.add(layout[k].name, std::move(a));
        } else {
            arrays.push_back(std::move(a));
        }
    }
    if (r.pos() + 8 != buf.size()) throw r.corrupt("trailing bytes");
    if (has_opt) {
        const auto &o = h.at("optimizer");
        num::AdamState<T> st;
        st.step = o.at("step").get<std::uint64_t>();
        st.learning_rate = std::bit_cast<double>(o.at("learning_rate_bits").get<std::uint64_t>());
        st.hyper.beta1 = std::bit_cast<double>(o.at("beta1_bits").get<std::uint64_t>());
        st.hyper.beta2 = std::bit_cast<double>(o.at("beta2_bits").get<std::uint64_t>());
        st.hyper.epsilon = std::bit_cast<double>(o.at("epsilon_bits").get<std::uint64_t>());
        const std::size_t n = layout.size();
        for (std::size_t i = 0; i < n; ++i) st.first_moment.push_back(std::move(arrays[i]));
        for (std::size_t i = 0; i < n; ++i) st.second_moment.push_back(std::move(arrays[n + i]));
        ck.optimizer = std::move(st);
    }
    return ck;
}

template void save_checkpoint<float>(const std::filesystem::path &, const Checkpoint<float> &);
template void save_checkpoint<double>(const std::filesystem::path &, const Checkpoint<double> &);
template Checkpoint<float> load_checkpoint<float>(const std::filesystem::path &);
template Checkpoint<double> load_checkpoint<double>(const std::filesystem::path &);

} // namespace maiformer::model
