"""
Test if read_yaml function correctly reads yaml files
"""

import pathlib

from modules.read_yaml import read_yaml


PARENT_DIRECTORY = pathlib.Path("tests", "unit", "read_yaml_configs")


class TestOpenConfig:
    """
    Test the open_config function
    """

    def test_open_config(self) -> None:
        """
        Test if the function correctly reads the yaml file
        """
        config_file_name = "config_no_error.yaml"

        expected = {"config": "no_error"}

        result, actual = read_yaml.open_config(pathlib.Path(PARENT_DIRECTORY, config_file_name))

        assert result
        assert actual == expected

    def test_open_config_file_not_found(self) -> None:
        """
        Test if the function handles file not found
        """
        config_file_name = "config_nonexistent_file.yaml"

        result, actual = read_yaml.open_config(pathlib.Path(PARENT_DIRECTORY, config_file_name))

        assert not result
        assert actual is None

    def test_open_config_empty_file(self) -> None:
        """
        Test if an empty file reads as an empty mapping
        """
        result, actual = read_yaml.open_config(pathlib.Path(PARENT_DIRECTORY, "config_empty.yaml"))

        assert result
        assert actual == {}

    def test_open_config_not_mapping(self) -> None:
        """
        Test if a top-level list is rejected
        """
        config_file_name = "config_not_mapping.yaml"

        result, actual = read_yaml.open_config(pathlib.Path(PARENT_DIRECTORY, config_file_name))

        assert not result
        assert actual is None

    def test_open_config_malformed(self) -> None:
        """
        Test if a YAML syntax error is handled
        """
        config_file_name = "config_malformed.yaml"

        result, actual = read_yaml.open_config(pathlib.Path(PARENT_DIRECTORY, config_file_name))

        assert not result
        assert actual is None


class TestMergeDefaults:
    """
    Test the merge_defaults function
    """

    def test_nested_values_override(self) -> None:
        """
        Test if file values win at every depth and defaults fill the rest
        """
        defaults = {"collector": {"host": "0.0.0.0", "port": 2055}, "workers": 1}
        config = {"collector": {"port": 9995}, "extra": [1, 2]}

        actual = read_yaml.merge_defaults(config, defaults)

        assert actual == {
            "collector": {"host": "0.0.0.0", "port": 9995},
            "workers": 1,
            "extra": [1, 2],
        }

    def test_inputs_unchanged(self) -> None:
        """
        Test if neither input is modified
        """
        defaults = {"collector": {"port": 2055}}
        config = {"collector": {"port": 9995}}

        actual = read_yaml.merge_defaults(config, defaults)
        actual["collector"]["port"] = 1

        assert defaults == {"collector": {"port": 2055}}
        assert config == {"collector": {"port": 9995}}
