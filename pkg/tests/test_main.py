"""
Tests for the MCP tool server
"""

import json

import pytest

from quantum_curves import main as server
from quantum_curves.main import TOOL_COMMANDS, call_tool, list_tools, resolve


def payload(content):
    """JSON part of a tool response."""
    assert len(content) == 1
    return json.loads(content[0].text.split("\n\n", 1)[1])


class TestListTools:
    """Test the advertised tools"""

    @pytest.mark.asyncio
    async def test_tool_names(self):
        """Test all eight tools are listed"""
        tools = await list_tools()
        assert {tool.name for tool in tools} == {
            "list_oracles",
            "get_oracle_info",
            "run_oracle",
            "compute_omega",
            "expand_omega",
            "wave_coefficients",
            "check_quantum_curve",
            "certify",
        }

    @pytest.mark.asyncio
    async def test_every_command_tool_is_listed(self):
        """Test dispatch and listing agree"""
        names = {tool.name for tool in await list_tools()}
        assert set(TOOL_COMMANDS) <= names


class TestOracleTools:
    """Test the oracle tools"""

    @pytest.mark.asyncio
    async def test_list_oracles(self):
        """Test listing one category"""
        content = await call_tool("list_oracles", {"category": "gromov-witten"})
        assert content[0].text.startswith("Found 6 oracles in category 'gromov-witten'")
        assert payload(content)["shape"]["rows"] == 6

    @pytest.mark.asyncio
    async def test_get_oracle_info(self):
        """Test one oracle's specification"""
        content = await call_tool("get_oracle_info", {"name": "dessins"})
        spec = json.loads(content[0].text)
        assert spec["arguments"] == ["e"]
        assert spec["category"] == "combinatorial"

    @pytest.mark.asyncio
    async def test_run_oracle(self):
        """Test Catalan numbers through a tool call"""
        content = await call_tool("run_oracle", {"name": "catalan", "args": ["3"]})
        assert "(passed)" in content[0].text
        assert [row["C_n"] for row in payload(content)["data"]] == ["1", "1", "2", "5"]

    @pytest.mark.asyncio
    async def test_integer_arguments(self):
        """Test JSON integers are accepted as arguments"""
        content = await call_tool("run_oracle", {"name": "catalan", "args": [2]})
        assert payload(content)["shape"]["rows"] == 3


class TestEngineTools:
    """Test the engine tools"""

    @pytest.mark.asyncio
    async def test_compute_omega(self):
        """Test omega^0_3 on the bundled Catalan curve"""
        content = await call_tool("compute_omega", {"curve": "catalan", "g": 0, "n": 3})
        assert payload(content)["columns"] == ["slots", "coefficient"]

    @pytest.mark.asyncio
    async def test_expand_omega(self):
        """Test Catalan numbers from the (0, 1) expansion"""
        content = await call_tool("expand_omega", {"g": 0, "n": 1, "depth": 7})
        rows = payload(content)["data"]
        assert [row["W"] for row in rows if int(row["mu"]) % 2 == 0] == ["1", "1", "2", "5"]

    @pytest.mark.asyncio
    async def test_wave_coefficients(self):
        """Test S_0 and S_1"""
        content = await call_tool("wave_coefficients", {"k": 1})
        assert payload(content)["shape"]["rows"] == 2

    @pytest.mark.asyncio
    async def test_check_quantum_curve(self):
        """Test the Catalan operator through hbar^2"""
        content = await call_tool("check_quantum_curve", {"operator": "catalan", "k": 2})
        assert "(passed)" in content[0].text

    @pytest.mark.asyncio
    async def test_certify(self):
        """Test one criterion through the tool"""
        content = await call_tool("certify", {"only": "1"})
        assert payload(content)["data"][0]["status"] == "pass"


class TestToolErrors:
    """Test errors come back as text"""

    @pytest.mark.asyncio
    async def test_invalid_pair(self):
        """Test (g, n) = (0, 0)"""
        content = await call_tool("compute_omega", {"g": 0, "n": 0})
        assert content[0].text.startswith("Error:")

    @pytest.mark.asyncio
    async def test_guard(self):
        """Test K above the limit"""
        content = await call_tool("wave_coefficients", {"k": 9})
        assert content[0].text == "Error: K must be between 0 and 8, got 9"

    @pytest.mark.asyncio
    async def test_unknown_oracle(self):
        """Test an invalid oracle name"""
        content = await call_tool("run_oracle", {"name": "nosuch"})
        assert content[0].text.startswith("Error: Unknown oracle")

    @pytest.mark.asyncio
    async def test_missing_curve(self):
        """Test a curve file that does not exist"""
        content = await call_tool("compute_omega", {"curve": "missing.curve", "g": 0, "n": 3})
        assert content[0].text == "Error: curve file not found: missing.curve"

    @pytest.mark.asyncio
    async def test_unknown_tool(self):
        """Test an unknown tool name"""
        content = await call_tool("plot", {})
        assert content[0].text == "Unknown tool: plot"


class TestCurvesDirectory:
    """Test relative files from the configured curves directory"""

    def test_unset(self):
        """Test names pass through without a directory"""
        assert resolve("mine.curve") == "mine.curve"

    @pytest.mark.asyncio
    async def test_lookup(self, tmp_path, monkeypatch):
        """Test a curve file found in the directory"""
        (tmp_path / "mine.curve").write_text("param = z\nx = z + 1/z\ny = 1/z\n")
        monkeypatch.setattr(server, "_curves_dir", tmp_path)
        assert resolve("mine.curve") == str(tmp_path / "mine.curve")
        assert resolve("catalan") == "catalan"
        content = await call_tool("compute_omega", {"curve": "mine.curve", "g": 0, "n": 3})
        assert payload(content)["title"] == "omega^0_3 of mine (quantum kernel)"
