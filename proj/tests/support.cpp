#include "support.hpp"

#include <atomic>
#include <fstream>
#include <iterator>
#include <random>

namespace testing {

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    dir_ = std::filesystem::temp_directory_path() /
           ("bsvd-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path &p, const std::vector<std::uint8_t> &bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Matrix<double> worked_example_matrix() {
    return Matrix<double>{
        {0.1206, 0.7675, 0.3103, 0.3527, 0.7382, 0.7008, 0.6985, 0.6836},
        {0.6438, 0.8468, 0.4922, 0.1086, 0.8833, 0.9463, 0.4762, 0.0463},
        {0.0623, 0.1681, 0.0378, 0.8734, 0.3093, 0.4652, 0.1508, 0.0702},
        {0.4903, 0.4045, 0.6989, 0.9629, 0.4463, 0.3890, 0.5055, 0.4994},
        {0.3061, 0.3025, 0.1704, 0.5332, 0.0403, 0.4388, 0.8133, 0.2996},
        {0.8164, 0.7730, 0.4167, 0.4056, 0.9273, 0.3014, 0.1878, 0.6929},
        {0.9972, 0.3156, 0.1199, 0.8503, 0.7538, 0.8448, 0.3805, 0.0510},
        {0.4246, 0.8355, 0.2274, 0.1604, 0.5861, 0.0802, 0.5890, 0.6763},
    };
}

} // namespace testing
