#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "aquasem/backends.hpp"
#include "aquasem/channel.hpp"
#include "aquasem/experiment.hpp"
#include "aquasem/image.hpp"
#include "aquasem/linkmath.hpp"
#include "aquasem/metrics.hpp"
#include "aquasem/mock_backends.hpp"
#include "aquasem/pipeline.hpp"
#include "aquasem/serialize.hpp"
#include "aquasem/text.hpp"
#include "aquasem/version.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null:
            return py::none();
        case nlohmann::json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case nlohmann::json::value_t::number_float:
            return py::float_(j.get<double>());
        case nlohmann::json::value_t::string:
            return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
        default:
            throw std::runtime_error("unsupported JSON value");
    }
}

aquasem::ErrorSpec make_spec(int error_type, double ratio, std::uint64_t seed) {
    aquasem::ErrorSpec spec;
    spec.error_type = aquasem::error_type_from_int(error_type);
    spec.ratio = ratio;
    spec.seed = seed;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Resilience toolkit for caption-based image transmission";
    m.attr("__version__") = aquasem::kVersion;

    py::register_exception<aquasem::TransportError>(m, "TransportError", PyExc_ConnectionError);
    py::register_exception<aquasem::ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

    py::class_<aquasem::ImageBuffer>(m, "ImageBuffer")
        .def(py::init([](int width, int height, int channels, py::bytes samples) {
                 aquasem::ImageBuffer img = aquasem::ImageBuffer::make(width, height, channels);
                 std::string raw = samples;
                 if (raw.size() != img.samples.size()) {
                     throw std::invalid_argument("sample buffer size does not match dimensions");
                 }
                 std::memcpy(img.samples.data(), raw.data(), raw.size());
                 return img;
             }),
             py::arg("width"), py::arg("height"), py::arg("channels"), py::arg("samples"))
        .def_readonly("width", &aquasem::ImageBuffer::width)
        .def_readonly("height", &aquasem::ImageBuffer::height)
        .def_readonly("channels", &aquasem::ImageBuffer::channels)
        .def("tobytes",
             [](const aquasem::ImageBuffer& img) {
                 return py::bytes(reinterpret_cast<const char*>(img.samples.data()),
                                  img.samples.size());
             })
        .def("at", [](const aquasem::ImageBuffer& img, int x, int y, int c) {
                 if (x < 0 || x >= img.width || y < 0 || y >= img.height || c < 0 ||
                     c >= img.channels) {
                     throw std::out_of_range("sample index out of range");
                 }
                 return img.at(x, y, c);
             },
             py::arg("x"), py::arg("y"), py::arg("c"))
        .def("__eq__", [](const aquasem::ImageBuffer& a,
                          const aquasem::ImageBuffer& b) { return a == b; })
        .def("__repr__", [](const aquasem::ImageBuffer& img) {
            return "ImageBuffer(" + std::to_string(img.width) + "x" +
                   std::to_string(img.height) + "x" + std::to_string(img.channels) + ")";
        });

    m.def("load_image", &aquasem::load_image, py::arg("path"),
          "Load a .ppm/.pgm/.pnm (or .png when supported) file.");
    m.def("save_image", &aquasem::save_image, py::arg("path"), py::arg("image"),
          "Write the canonical binary pixmap encoding.");
    m.def("png_supported", &aquasem::png_supported);
    m.def("to_gray", &aquasem::to_gray, py::arg("image"));
    m.def("resize_bilinear", &aquasem::resize_bilinear, py::arg("image"), py::arg("width"),
          py::arg("height"));

    m.def("sanitize",
          [](const std::string& text) { return aquasem::sanitize(text).content; },
          py::arg("text"), "Replace runs of non-printable bytes with single spaces.");
    m.def("split_words",
          [](const std::string& text) { return aquasem::split_words(text); }, py::arg("text"));

    m.def("corrupt",
          [](const std::string& text, int error_type, double ratio, std::uint64_t seed) {
              aquasem::TextMessage msg = aquasem::sanitize(text);
              auto outcome = aquasem::corrupt(msg, make_spec(error_type, ratio, seed));
              py::dict out;
              out["corrupted"] = outcome.corrupted.content;
              out["affected_units"] = outcome.affected_units;
              out["total_units"] = outcome.total_units;
              out["realized_ratio"] = outcome.realized_ratio();
              return out;
          },
          py::arg("text"), py::arg("error_type"), py::arg("ratio"), py::arg("seed"),
          "Apply one text-level error type (1 substitution, 2 char deletion, 3 word "
          "deletion) to sanitized text.");

    m.def("ber_bounds",
          [](double cer, int bits_per_char) {
              auto b = aquasem::ber_bounds(cer, bits_per_char);
              py::dict out;
              out["cer"] = b.cer;
              out["bits_per_char"] = b.bits_per_char;
              out["lower"] = b.lower;
              out["upper"] = b.upper;
              return out;
          },
          py::arg("cer"), py::arg("bits_per_char") = 8,
          "Bit error ratio interval implied by a character error ratio.");

    m.def("mse", &aquasem::mse, py::arg("a"), py::arg("b"));
    m.def("psnr", &aquasem::psnr, py::arg("a"), py::arg("b"));
    m.def("ssim", &aquasem::ssim, py::arg("a"), py::arg("b"));

    m.def("mock_caption",
          [](const aquasem::ImageBuffer& img) {
              return aquasem::MockCaptioner().caption(img).content;
          },
          py::arg("image"));
    m.def("mock_generate",
          [](const std::string& prompt, std::uint64_t seed, int width, int height) {
              aquasem::GenerationRequest req;
              req.prompt = aquasem::sanitize(prompt);
              req.seed = seed;
              req.width = width;
              req.height = height;
              return aquasem::MockGenerator().generate(req);
          },
          py::arg("prompt"), py::arg("seed"), py::arg("width") = 512, py::arg("height") = 512);
    m.def("mock_embed",
          [](const aquasem::ImageBuffer& img) {
              return aquasem::MockEmbedder().embed(img).values;
          },
          py::arg("image"));
    m.def("clip_score",
          [](const aquasem::ImageBuffer& a, const aquasem::ImageBuffer& b) {
              aquasem::MockEmbedder embedder;
              return aquasem::clip_score(a, b, embedder);
          },
          py::arg("a"), py::arg("b"),
          "Clamped cosine similarity (0-100) under the offline mock embedder.");

    m.def("builtin_control_image", &aquasem::builtin_control_image);
    m.def("default_grid_ratios", [] { return aquasem::default_grid().ratios; },
          "Default requested-ratio grid: 0.00, 0.05, ..., 0.50.");
    m.def("mix_channel_seed", &aquasem::mix_channel_seed, py::arg("base"), py::arg("error_type"),
          py::arg("ratio_index"), py::arg("image_index"),
          "Per-cell channel seed derived from the sweep seed base.");

    m.def("run_mock_trial",
          [](const aquasem::ImageBuffer& original, int error_type, double ratio,
             std::uint64_t seed, std::uint64_t gen_seed, int gen_width, int gen_height) {
              aquasem::TrialOptions opts;
              opts.gen_width = gen_width;
              opts.gen_height = gen_height;
              auto record = aquasem::run_trial(
                  "inline", original, aquasem::builtin_control_image(),
                  make_spec(error_type, ratio, seed), gen_seed,
                  aquasem::make_mock_providers(), opts);
              return json_to_py(aquasem::trial_to_json(record));
          },
          py::arg("original"), py::arg("error_type"), py::arg("ratio"), py::arg("seed"),
          py::arg("gen_seed") = 0, py::arg("gen_width") = 64, py::arg("gen_height") = 64,
          "One caption -> corrupt -> generate -> score trial with the offline mock "
          "providers, scored against the built-in control image.");
}
