#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <system_error>

#include "kreg/dataset.hpp"

namespace testutil {

/// The toy input set: {(1,100),(2,40),(3,0),(15,50),(16,50),(17,50)}.
inline kreg::Dataset two_clusters() {
    return kreg::Dataset({{{1.0}, 100.0, 1.0},
                          {{2.0}, 40.0, 1.0},
                          {{3.0}, 0.0, 1.0},
                          {{15.0}, 50.0, 1.0},
                          {{16.0}, 50.0, 1.0},
                          {{17.0}, 50.0, 1.0}});
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("kreg_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace testutil
