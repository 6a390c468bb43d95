#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "epp/error.hpp"

namespace epp {

/// Square grayscale image. Storage is column-major, so the flat data is
/// exactly vec(X) and Kronecker identities apply without reshuffling.
class Image {
public:
    Image() = default;

    explicit Image(Eigen::Index m, double fill = 0.0) : data_(Eigen::MatrixXd::Constant(m, m, fill)) {
        if (m < 1) throw InvalidParameter("image side length must be positive");
    }

    explicit Image(Eigen::MatrixXd data) : data_(std::move(data)) {
        if (data_.rows() != data_.cols()) throw DimensionMismatch("image must be square");
    }

    [[nodiscard]] Eigen::Index side() const { return data_.rows(); }
    [[nodiscard]] Eigen::Index size() const { return data_.size(); }

    double& operator()(Eigen::Index row, Eigen::Index col) { return data_(row, col); }
    double operator()(Eigen::Index row, Eigen::Index col) const { return data_(row, col); }

    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return data_; }
    Eigen::MatrixXd& matrix() { return data_; }

    /// vec(X) view.
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> vec() const { return {data_.data(), data_.size()}; }
    Eigen::Map<Eigen::VectorXd> vec() { return {data_.data(), data_.size()}; }

    static Image from_vec(const Eigen::VectorXd& v, Eigen::Index m) {
        if (v.size() != m * m) throw DimensionMismatch("vector length does not match m*m");
        return Image(Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), m, m)));
    }

    Image& operator+=(const Image& other) {
        check_same(other);
        data_ += other.data_;
        return *this;
    }
    Image& operator-=(const Image& other) {
        check_same(other);
        data_ -= other.data_;
        return *this;
    }
    Image& operator*=(double s) {
        data_ *= s;
        return *this;
    }

    friend Image operator+(Image a, const Image& b) { return a += b; }
    friend Image operator-(Image a, const Image& b) { return a -= b; }
    friend Image operator*(double s, Image a) { return a *= s; }

    [[nodiscard]] double norm() const { return data_.norm(); }
    [[nodiscard]] double dot(const Image& other) const {
        check_same(other);
        return vec().dot(other.vec());
    }

    friend bool operator==(const Image& a, const Image& b) {
        return a.data_.rows() == b.data_.rows() && a.data_ == b.data_;
    }

private:
    void check_same(const Image& other) const {
        if (other.side() != side()) throw DimensionMismatch("image sizes differ");
    }

    Eigen::MatrixXd data_;
};

}  // namespace epp
