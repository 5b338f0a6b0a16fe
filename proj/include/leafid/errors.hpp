#ifndef LEAFID_ERRORS_HPP
#define LEAFID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace leafid {

/// Base of all errors raised by the toolkit. `name()` is a stable
/// machine-readable identifier; `what()` adds the offending input.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(message), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

struct FileNotFound : Error {
    explicit FileNotFound(const std::string& path)
        : Error("FileNotFound", "file not found: " + path) {}
};

struct DecodeError : Error {
    explicit DecodeError(const std::string& path)
        : Error("DecodeError", "cannot decode image: " + path) {}
};

struct IoError : Error {
    explicit IoError(const std::string& detail) : Error("IoError", detail) {}
};

struct NoForeground : Error {
    explicit NoForeground(const std::string& detail)
        : Error("NoForeground", detail) {}
};

struct DegenerateRadius : Error {
    explicit DegenerateRadius(const std::string& detail)
        : Error("DegenerateRadius", detail) {}
};

struct DegenerateShape : Error {
    explicit DegenerateShape(const std::string& detail)
        : Error("DegenerateShape", detail) {}
};

struct EmptyGlcm : Error {
    explicit EmptyGlcm(const std::string& detail) : Error("EmptyGlcm", detail) {}
};

struct AllDirectionsEmpty : Error {
    explicit AllDirectionsEmpty(const std::string& detail)
        : Error("AllDirectionsEmpty", detail) {}
};

struct EmptyTrainingSet : Error {
    EmptyTrainingSet() : Error("EmptyTrainingSet", "training set is empty") {}
};

struct SingleClass : Error {
    SingleClass() : Error("SingleClass", "training set has fewer than 2 classes") {}
};

struct NonPositiveSigma : Error {
    explicit NonPositiveSigma(double sigma)
        : Error("NonPositiveSigma",
                "smoothing factor must be > 0, got " + std::to_string(sigma)) {}
};

struct DimensionMismatch : Error {
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("DimensionMismatch", "expected dimension " + std::to_string(expected) +
                                         ", got " + std::to_string(got)) {}
};

struct EmptyDataset : Error {
    explicit EmptyDataset(const std::string& root)
        : Error("EmptyDataset", "no class directories with images under: " + root) {}
};

struct ClassWithNoImages : Error {
    explicit ClassWithNoImages(const std::string& label)
        : Error("ClassWithNoImages", "class has no images: " + label) {}
};

struct InsufficientImages : Error {
    InsufficientImages(const std::string& label, std::size_t have, std::size_t need)
        : Error("InsufficientImages", "class '" + label + "' has " +
                                          std::to_string(have) + " images, protocol needs " +
                                          std::to_string(need)) {}
};

struct InvalidManifest : Error {
    explicit InvalidManifest(const std::string& detail)
        : Error("InvalidManifest", detail) {}
};

struct ModelFormatError : Error {
    explicit ModelFormatError(const std::string& detail)
        : Error("ModelFormatError", detail) {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& detail)
        : Error("InvalidArgument", detail) {}
};

}  // namespace leafid

#endif
